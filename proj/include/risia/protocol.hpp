// SPDX-License-Identifier: Apache-2.0
//
// risia: initial access optimization for RIS-assisted mmWave cells
// Copyright (C) 2026 The risia authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISIA_PROTOCOL_HPP
#define RISIA_PROTOCOL_HPP

#include "risia/randomization.hpp"

#include <nlohmann/json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace risia
{

enum class Variant
{
    p3,   // phases from the feasibility problem
    p4,   // phases maximizing the residual SNR of inactive zones
    sweep // conventional one-beam-per-slot sweep, no RIS optimization
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string &name);

struct FeasibilityReport
{
    bool feasible = true;
    std::vector<double> slack; // SNR_q - tau for claimed zones, 0 for unclaimed ones
};

// A selection is feasible when every claimed zone reaches tau (1 - tol) and, if any zone
// is claimed, at least one beam is active.
FeasibilityReport check_feasible(const SelectionVector &selection, const PhaseConfig &phases,
                                 const CellScenario &scenario, double tol);

struct StopConfig
{
    int max_iters = 10;
    int stable_iters = 2; // stop once the objective has not grown for this many iterations
};

struct ProtocolConfig
{
    StopConfig stop;
    // Rounding only needs an approximate relaxed optimum; the cap bounds degenerate solves.
    sdp::SolverSettings solver{.tol = 1e-4, .max_iters = 1000};
    RoundingConfig rounding;
    P2Options p2;
    bool random_initial_phases = false;
};

struct AlternationResult
{
    SelectionVector selection;
    PhaseConfig phases;
    double objective = 0.0;
    std::vector<double> trace; // accepted objective after each iteration
    int iterations = 0;
    int rejected_iterations = 0;
    bool found_feasible = false;
    int sdp_iterations = 0;
};

// Alternates relaxed (P2) + rounding with relaxed (P3)/(P4) + rounding, keeping the best
// feasible (selection, phases) pair so that the accepted objective never decreases.
AlternationResult alternate(const CellScenario &scenario, const ZTable &z, const CoverageState &coverage,
                            const PhaseConfig &initial_phases, Variant variant, const ProtocolConfig &cfg,
                            std::uint64_t stream_key);

struct SlotResult
{
    int index = 0;
    SelectionVector selection;
    PhaseConfig phases;
    std::vector<int> newly_covered;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> trace;
    std::vector<double> zone_snr; // linear, every zone, under this slot's beams and phases
};

struct GuardEvent
{
    int before_slot = 0;
    int zone = 0; // zone declared unreachable
};

struct RunResult
{
    Variant variant = Variant::p4;
    std::vector<SlotResult> slots;
    int total_slots = 0;
    std::vector<int> covered_zones;
    std::vector<int> unreachable_zones;
    std::vector<GuardEvent> guard_events;
    std::uint64_t rng_seed = 0;
    int alternations = 0;
    long sdp_iterations = 0;
    double snr_threshold = 0.0;
};

RunResult run_initial_access(const CellScenario &scenario, Variant variant, const ProtocolConfig &cfg);

// One beam per slot in codebook order with theta = 0; always N slots.
RunResult run_beam_sweep(const CellScenario &scenario);

nlohmann::json to_json(const RunResult &run);

// One row per slot: slot, newly_covered, cumulative_weight, objective.
void write_slots_csv(const RunResult &run, const CellScenario &scenario, std::ostream &out);

} // namespace risia

#endif
