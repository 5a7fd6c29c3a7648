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

#ifndef RISIA_RELAXATIONS_HPP
#define RISIA_RELAXATIONS_HPP

#include "risia/geometry.hpp"
#include "risia/sdp.hpp"

#include <vector>

namespace risia
{

// Zones activated in earlier timeslots. The weight matrix F is
// diag([0_N, w_1, ..., w_Q, 0]) with the entries of covered zones zeroed.
struct CoverageState
{
    std::vector<int> covered; // Q entries, 0 or 1

    CoverageState() = default;
    explicit CoverageState(int num_zones) : covered(static_cast<std::size_t>(num_zones), 0) {}

    Eigen::MatrixXd weight_matrix(const CellScenario &scenario) const;
    double uncovered_weight(const CellScenario &scenario) const;
    int num_uncovered() const;
    bool all_covered() const { return num_uncovered() == 0; }
};

// Binary beam indicators y and zone indicators r; lifted form v = [y; r; 1].
struct SelectionVector
{
    std::vector<int> y;
    std::vector<int> r;

    SelectionVector() = default;
    SelectionVector(int num_beams, int num_zones)
        : y(static_cast<std::size_t>(num_beams), 0), r(static_cast<std::size_t>(num_zones), 0) {}

    int num_active_beams() const;
    int num_claimed_zones() const;
    Eigen::VectorXd lifted() const;

    // Inverse of lifted(); entries are thresholded at 1/2.
    static SelectionVector from_lifted(const Eigen::VectorXd &v, int num_beams, int num_zones);

    friend bool operator==(const SelectionVector &, const SelectionVector &) = default;
};

// RIS phases theta in [0, 2 pi). The lifted vector follows t = [e^{j theta_1}, ..., e^{j theta_M}]^H,
// i.e. t_i = e^{-j theta_i}, with t_bar = [t; 1] and T = t_bar t_bar^H.
struct PhaseConfig
{
    std::vector<double> theta;

    PhaseConfig() = default;
    explicit PhaseConfig(std::vector<double> phases);
    static PhaseConfig zeros(int num_elements);

    // Phases of a lifted vector, normalized by its last entry.
    static PhaseConfig from_lifted(const Eigen::VectorXcd &t_bar);

    Eigen::VectorXcd t() const;
    Eigen::VectorXcd t_bar() const;
    Eigen::MatrixXcd lifted() const;
};

// Wraps an angle into [0, 2 pi).
double wrap_phase(double angle);

// ---------- (P2): beam and zone selection for fixed phases ----------

// Quadratic-form matrices in raw power units, stored symmetric. For v = [y; r; 1]:
//   v^T A_q v = sum_n |h_q^H b_n|^2 y_n
//   v^T C_q v = tau sigma^2 r_q sum_n y_n
//   v^T H_p v = v_p^2 - v_p                      (zero iff v_p is binary)
Eigen::MatrixXd p2_gain_matrix(const CellScenario &scenario, const Eigen::MatrixXd &gains, int zone);
Eigen::MatrixXd p2_threshold_matrix(const CellScenario &scenario, int zone);
Eigen::MatrixXd p2_binary_matrix(int num_beams, int num_zones, int index);

struct P2Options
{
    // Adds sum_n y_n >= 1, which the SNR normalization implicitly requires.
    bool require_active_beam = true;
    // Adds r_q (sum_n y_n - 1) >= 0 in lifted form for every zone. Valid for binaries once
    // sum_n y_n >= 1 holds; it stops a zone from being claimed with almost no beam mass.
    bool lift_active_beam = true;
};

// Relaxed (P2) over V of size N + Q + 1. The zone constraints are scaled by 1/sigma^2
// so that they read in SNR units; the feasible set is unchanged.
sdp::SdpProblem build_p2(const CellScenario &scenario, std::span<const double> phases,
                         const CoverageState &coverage, const P2Options &options = {});

// ---------- (P3)/(P4): phases for a fixed selection ----------

// Z_{q,n} = g g^H with g = [Omega_q b_n; h_{d,q}^H b_n], so that
// t_bar^H Z_{q,n} t_bar = |(t^H Omega_q + h_{d,q}^H) b_n|^2.
class ZTable
{
  public:
    explicit ZTable(const CellScenario &scenario);

    int num_zones() const { return num_zones_; }
    int num_beams() const { return num_beams_; }
    int dim() const { return dim_; }

    const Eigen::VectorXcd &generator(int zone, int beam) const { return gens_[index(zone, beam)]; }
    Eigen::MatrixXcd matrix(int zone, int beam) const;

    // sum_n y_n Z_{q,n}
    Eigen::MatrixXcd zone_matrix(int zone, std::span<const int> beam_indicators) const;

  private:
    std::size_t index(int zone, int beam) const
    {
        return static_cast<std::size_t>(zone) * static_cast<std::size_t>(num_beams_) + static_cast<std::size_t>(beam);
    }

    int num_zones_;
    int num_beams_;
    int dim_;
    std::vector<Eigen::VectorXcd> gens_;
};

Eigen::MatrixXcd build_z(const CellScenario &scenario, int zone, int beam);

// Relaxed (P3): feasibility over the real embedding of T (size 2(M+1)). Contains Q zone
// inequalities followed by M+1 unit-diagonal equalities; no fixed entries. Zone rows
// read sum_n y_n tr(Z_{q,n} T) / (sigma^2 sum_n y_n) >= tau r_q.
sdp::SdpProblem build_p3(const CellScenario &scenario, const ZTable &z, const SelectionVector &selection);

// Relaxed (P4): as build_p3 plus Q nonnegative residual-SNR scalars gamma_q entering zone q's
// row as -(1 - r_q) gamma_q and the objective as (1 - r_q) w_q gamma_q. gamma_q is measured in
// the same averaged-SNR units as the row. Zones already covered carry zero weight.
sdp::SdpProblem build_p4(const CellScenario &scenario, const ZTable &z, const SelectionVector &selection,
                         const CoverageState &coverage);

// Hermitian T recovered from an embedded (P3)/(P4) solution.
Eigen::MatrixXcd deembed_phase_matrix(const Eigen::MatrixXd &x);

} // namespace risia

#endif
