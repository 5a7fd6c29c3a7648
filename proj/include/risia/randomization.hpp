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

#ifndef RISIA_RANDOMIZATION_HPP
#define RISIA_RANDOMIZATION_HPP

#include "risia/relaxations.hpp"

#include <cstdint>

namespace risia
{

// How binary candidates are drawn from a relaxed (P2) solution V*.
enum class BinarySampling
{
    // v ~ N(0, V'), V' the leading S x S block; entry -> 1 iff v_j >= 0.
    zero_mean,
    // v ~ N(mu, V' - mu mu^T), mu = first S entries of V*'s last column; entry -> 1 iff v_j >= 1/2.
    // V* is read as the second moment of a random binary vector with a constant last entry.
    moment_matched
};

struct RoundingConfig
{
    int trials_p2 = 200;    // L_1
    int trials_phase = 200; // L_2
    std::uint64_t rng_seed = 1;
    double feasibility_tol = 1e-8; // relative SNR slack accepted as feasible
    double rank_one_tol = 1e-6;    // second / first eigenvalue ratio
    BinarySampling binary_sampling = BinarySampling::zero_mean;
    // Also evaluate each sampled beam set with r_q = 1 for exactly the uncovered zones it
    // activates, which is the best zone vector for those beams.
    bool complete_zones = true;
    // Also evaluate, for every sample, the k beams with the largest sampled values for
    // k = 1..N (each with its completed zone vector): a threshold sweep over the sample.
    bool threshold_sweep = true;

    void validate() const;
};

// Result of a randomized rounding. When `feasible` is false the candidate is the best
// infeasible one (smallest total constraint violation) and the caller decides the fallback.
struct P2Rounding
{
    SelectionVector selection;
    bool feasible = false;
    double objective = 0.0; // sum of w_q r_q over zones that are still uncovered
    double violation = 0.0;
    bool rank_one = false;
    int feasible_trials = 0;
};

struct PhaseRounding
{
    PhaseConfig phases;
    bool feasible = false;
    double objective = 0.0; // (P4): weighted residual SNR; (P3): minimum relative slack
    double violation = 0.0;
    bool rank_one = false;
    int feasible_trials = 0;
};

enum class PhaseProblem
{
    p3,
    p4
};

// Objective and feasibility of a binary selection under fixed phases (gains from beam_gains()).
double selection_objective(const CellScenario &scenario, const CoverageState &coverage, const SelectionVector &s);
double selection_violation(const CellScenario &scenario, const Eigen::MatrixXd &gains, const SelectionVector &s,
                           double feasibility_tol);

// Binary rounding of a relaxed (P2) solution. stream_key identifies the call so that
// different calls under the same seed use disjoint random streams.
P2Rounding round_p2(const Eigen::MatrixXd &v_star, const CellScenario &scenario, std::span<const double> phases,
                    const CoverageState &coverage, const RoundingConfig &cfg, std::uint64_t stream_key);

struct PhaseContext
{
    const CellScenario &scenario;
    const ZTable &z;
    const SelectionVector &selection;
    const CoverageState &coverage;
};

// Average SNR of every zone under the selection's beams and the given lifted phase vector.
Eigen::VectorXd zone_snrs(const PhaseContext &ctx, const Eigen::VectorXcd &t_bar);

// Unit-modulus rounding of a relaxed (P3)/(P4) solution T* (Hermitian, size M+1).
PhaseRounding round_phase(const Eigen::MatrixXcd &t_star, PhaseProblem kind, const PhaseContext &ctx,
                          const RoundingConfig &cfg, std::uint64_t stream_key);

} // namespace risia

#endif
