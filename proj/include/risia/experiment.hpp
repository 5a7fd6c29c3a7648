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

#ifndef RISIA_EXPERIMENT_HPP
#define RISIA_EXPERIMENT_HPP

#include "risia/config.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace risia
{

inline constexpr const char *aggregate_csv_header = "# risia aggregate v1";
inline constexpr const char *output_dir_env = "RISIA_OUTPUT_DIR";

struct RunKey
{
    Variant variant = Variant::p4;
    double tau_db = 0.0;
    std::uint64_t seed = 0;
};

// One line of the aggregate CSV. Only deterministic quantities appear here; wall-clock
// times go to a separate file.
struct AggregateRow
{
    RunKey key;
    int total_slots = 0;
    int covered = 0;
    int unreachable = 0;
    int alternations = 0;
    long sdp_iterations = 0;
};

struct RunRecord
{
    AggregateRow row;
    RunResult result;
    double wall_seconds = 0.0;
};

struct ExperimentOptions
{
    std::filesystem::path output_dir; // empty: environment override, then the config value
    int jobs = 1;
    bool write_files = true;
};

struct ExperimentReport
{
    std::vector<RunRecord> records; // in key order: variant (config order), tau, seed
    bool complete = false;
    std::string error;             // first failure when incomplete
    std::filesystem::path output_dir;
};

// The grid in deterministic order.
std::vector<RunKey> experiment_grid(const ExperimentConfig &cfg);

// Scenario and protocol settings for one grid point.
CellScenario scenario_for(const ExperimentConfig &cfg, const RunKey &key);
ProtocolConfig protocol_for(const ExperimentConfig &cfg, const RunKey &key);

RunRecord run_single(const ExperimentConfig &cfg, const RunKey &key);

// Runs the grid on `jobs` worker threads. Output files: runs/<name>.json and
// runs/<name>_slots.csv per run, aggregate.csv, timings.csv, manifest.json and
// slots_vs_threshold.svg. A failing run stops the queue; finished runs are still written
// and the manifest is marked incomplete.
ExperimentReport run_experiment(const ExperimentConfig &cfg, const ExperimentOptions &options = {});

std::filesystem::path resolve_output_dir(const ExperimentConfig &cfg, const std::filesystem::path &cli_override);

std::string run_name(const RunKey &key);

void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out);
std::vector<AggregateRow> read_aggregate_csv(std::istream &in);

// Line chart of mean total_slots against tau_db, one line per variant, from CSV rows only.
std::string render_slots_svg(const std::vector<AggregateRow> &rows);

} // namespace risia

#endif
