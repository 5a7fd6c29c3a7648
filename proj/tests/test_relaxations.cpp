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

#include "catch_amalgamated.hpp"
#include "oracles/brute_force.hpp"
#include "risia/relaxations.hpp"

#include <cmath>
#include <random>

// Covered tests:
// - Coverage weight matrix
// - Lifted selection and phase vectors
// - (P2) matrices: hand expansion, SNR equivalence on binary points, binariness rows
// - (P2) solves: all-covered objective
// - Z matrices: quadratic identity, RIS-free fixture, PSD
// - (P3)/(P4): sizes, vacuous rows, grid oracles, shared feasible set, weight scaling

using namespace risia;

namespace
{

ScenarioParams toy_params(int N, int Q, int M)
{
    ScenarioParams p;
    p.num_zones = Q;
    p.num_bs_antennas = std::max(N, 2);
    p.num_beams = N;
    p.num_ris_elements = M;
    p.cell_radius = 300.0;
    return p;
}

// Scales each RIS-to-zone link so that, for beam 0, the reflected amplitude summed over
// elements is `ratio` times the direct amplitude.
CellScenario with_strong_ris(CellScenario sc, double ratio)
{
    for (int q = 0; q < sc.num_zones(); ++q)
    {
        const Eigen::VectorXcd ob = cascaded_channel(sc, q) * sc.codebook.beams[0];
        const double direct = std::abs((sc.channels.direct[q] * sc.codebook.beams[0]).value());
        sc.channels.ris_to_zone[q] *= ratio * direct / ob.cwiseAbs().sum();
    }
    return sc;
}

double quad(const Eigen::MatrixXd &a, const Eigen::VectorXd &v)
{
    return v.dot(a * v);
}

double row_value(const sdp::Constraint &c, const Eigen::MatrixXd &x, const Eigen::VectorXd &s = {})
{
    double v = c.a.cwiseProduct(x).sum();
    if (c.scalar_coeffs.size() > 0)
        v += c.scalar_coeffs.dot(s);
    return v;
}

SelectionVector random_selection(int N, int Q, std::mt19937_64 &rng, bool need_beam)
{
    std::bernoulli_distribution coin(0.5);
    SelectionVector s(N, Q);
    for (auto &y : s.y)
        y = coin(rng) ? 1 : 0;
    for (auto &r : s.r)
        r = coin(rng) ? 1 : 0;
    if (need_beam && s.num_active_beams() == 0)
        s.y[static_cast<std::size_t>(rng() % static_cast<unsigned>(N))] = 1;
    return s;
}

std::vector<double> random_phases(int m, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    std::vector<double> theta(static_cast<std::size_t>(m));
    for (auto &t : theta)
        t = ud(rng);
    return theta;
}

} // namespace

TEST_CASE("Relaxations - coverage weight matrix")
{
    const CellScenario sc = build_scenario(toy_params(4, 6, 2));
    CoverageState cov(6);
    cov.covered[1] = 1;
    cov.covered[4] = 1;
    const Eigen::MatrixXd F = cov.weight_matrix(sc);
    REQUIRE(F.rows() == 4 + 6 + 1);
    CHECK((F - Eigen::MatrixXd(F.diagonal().asDiagonal())).norm() == 0.0);
    for (int n = 0; n < 4; ++n)
        CHECK(F(n, n) == 0.0);
    CHECK(F(10, 10) == 0.0);
    CHECK(F(4 + 1, 4 + 1) == 0.0);
    CHECK(F(4 + 0, 4 + 0) == sc.zones[0].weight);
    double uncovered = 0.0;
    for (int q = 0; q < 6; ++q)
        if (!cov.covered[q])
            uncovered += sc.zones[q].weight;
    CHECK(std::abs(F.trace() - uncovered) <= 1e-12);
    CHECK(std::abs(cov.uncovered_weight(sc) - uncovered) <= 1e-12);
    CHECK(cov.num_uncovered() == 4);
    CHECK_FALSE(cov.all_covered());
}

TEST_CASE("Relaxations - lifted vectors")
{
    SelectionVector s(3, 2);
    s.y = {1, 0, 1};
    s.r = {0, 1};
    const Eigen::VectorXd v = s.lifted();
    REQUIRE(v.size() == 6);
    CHECK(v(5) == 1.0);
    CHECK(SelectionVector::from_lifted(v, 3, 2) == s);
    CHECK(s.num_active_beams() == 2);
    CHECK(s.num_claimed_zones() == 1);

    const PhaseConfig pc({0.3, 2.0, 5.5});
    const Eigen::VectorXcd t = pc.t();
    for (int i = 0; i < 3; ++i)
    {
        CHECK(std::abs(t(i) - std::polar(1.0, -pc.theta[i])) <= 1e-15);
        CHECK(std::abs(t(i)) == Catch::Approx(1.0).margin(1e-15));
    }
    const Eigen::MatrixXcd T = pc.lifted();
    CHECK((T - T.adjoint()).norm() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
    CHECK(es.eigenvalues()(2) <= 1e-14);
    CHECK(std::abs(es.eigenvalues()(3) - 4.0) <= 1e-14);

    // Global phase on the lifted vector does not change the recovered phases
    const PhaseConfig back = PhaseConfig::from_lifted(std::polar(1.0, 0.7) * pc.t_bar());
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(std::remainder(back.theta[i] - pc.theta[i], 2.0 * std::numbers::pi)) <= 1e-14);

    CHECK(wrap_phase(-0.5) == Catch::Approx(2.0 * std::numbers::pi - 0.5).margin(1e-15));
    CHECK(wrap_phase(2.0 * std::numbers::pi) == 0.0);
}

TEST_CASE("Relaxations - P2 matrices by hand")
{
    ScenarioParams p = toy_params(2, 1, 1);
    p.snr_threshold = 0.0;
    const CellScenario sc = build_scenario(p);
    const std::vector<double> theta = {0.4};
    const Eigen::MatrixXd gains = beam_gains(sc, theta);

    // v = [y1, y2, r1, 1]: v^T A v = g1 y1 + g2 y2
    const Eigen::MatrixXd A = p2_gain_matrix(sc, gains, 0);
    REQUIRE(A.rows() == 4);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    expected(0, 3) = expected(3, 0) = 0.5 * gains(0, 0);
    expected(1, 3) = expected(3, 1) = 0.5 * gains(0, 1);
    CHECK((A - expected).norm() == 0.0);

    // tau = 0: C vanishes
    CHECK(p2_threshold_matrix(sc, 0).norm() == 0.0);

    ScenarioParams p2 = p;
    p2.snr_threshold = 10.0;
    const CellScenario sc2 = build_scenario(p2);
    const Eigen::MatrixXd C = p2_threshold_matrix(sc2, 0);
    const double c = 0.5 * 10.0 * sc2.noise_power();
    CHECK(C(2, 0) == c);
    CHECK(C(0, 2) == c);
    CHECK(C(2, 1) == c);
    CHECK(C(1, 2) == c);
    CHECK(std::abs(C.sum() - 4.0 * c) <= 1e-30);
}

TEST_CASE("Relaxations - P2 rows encode the SNR condition on binary points")
{
    std::mt19937_64 rng(41);
    ScenarioParams p = toy_params(5, 4, 3);
    p.snr_threshold = 3e4;
    const CellScenario sc = build_scenario(p, 6);
    const CoverageState cov(4);
    int agree = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::vector<double> theta = random_phases(3, rng);
        const SelectionVector s = random_selection(5, 4, rng, true);
        const Eigen::VectorXd v = s.lifted();
        const sdp::SdpProblem prob = build_p2(sc, theta, cov);
        for (int q = 0; q < 4; ++q)
        {
            const double lhs = quad(prob.constraints[q].a, v);
            const double snr_q = oracle::direct_snr(sc, q, s.y, theta);
            const bool row_holds = lhs >= -1e-9 * snr_q * s.num_active_beams();
            const bool snr_holds = s.r[q] == 0 || snr_q >= p.snr_threshold;
            CHECK(row_holds == snr_holds);
            agree += row_holds == snr_holds;
        }
        // Every other row holds on binary points with at least one beam
        for (std::size_t k = 4; k < prob.constraints.size(); ++k)
        {
            const auto &c = prob.constraints[k];
            const double lhs = quad(c.a, v);
            if (c.sense == sdp::Sense::equal)
                CHECK(std::abs(lhs - c.bound) <= 1e-12);
            else
                CHECK(lhs >= c.bound - 1e-12);
        }
    }
    CHECK(agree == 800);
}

TEST_CASE("Relaxations - P2 structure")
{
    const CellScenario sc = build_scenario(toy_params(4, 3, 2));
    const std::vector<double> theta = {0.0, 0.0};
    const CoverageState cov(3);

    const sdp::SdpProblem full = build_p2(sc, theta, cov);
    CHECK(full.dim == 8);
    CHECK(full.constraints.size() == 3 + 7 + 1 + 3);
    REQUIRE(full.fixed_entries.size() == 1);
    CHECK(full.fixed_entries[0].row == 7);
    CHECK(full.fixed_entries[0].col == 7);
    CHECK(full.fixed_entries[0].value == 1.0);
    CHECK_NOTHROW(full.validate());

    P2Options plain;
    plain.require_active_beam = false;
    CHECK(build_p2(sc, theta, cov, plain).constraints.size() == 3 + 7);

    // Binariness rows: tr(H_p v v^T) = 0 for every binary v with last entry 1
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial)
    {
        const Eigen::VectorXd v = random_selection(4, 3, rng, false).lifted();
        for (int i = 0; i < 7; ++i)
            CHECK(quad(p2_binary_matrix(4, 3, i), v) == 0.0);
    }
    Eigen::VectorXd frac = Eigen::VectorXd::Ones(8);
    frac(2) = 0.5;
    CHECK(quad(p2_binary_matrix(4, 3, 2), frac) == Catch::Approx(-0.25));
}

TEST_CASE("Relaxations - P2 with every zone covered")
{
    const CellScenario sc = build_scenario(toy_params(4, 3, 2));
    CoverageState cov(3);
    cov.covered = {1, 1, 1};
    const sdp::SdpProblem p = build_p2(sc, std::vector<double>{0.0, 0.0}, cov);
    CHECK(p.objective.norm() == 0.0);
    const auto sol = sdp::solve(p);
    CHECK(sol.status == sdp::SolveStatus::optimal);
    CHECK(std::abs(sol.objective_value) <= 1e-6);
}

TEST_CASE("Relaxations - Z matrices")
{
    std::mt19937_64 rng(77);
    const CellScenario sc = build_scenario(toy_params(6, 4, 5), 3);
    const ZTable table(sc);
    REQUIRE(table.dim() == 6);
    for (int trial = 0; trial < 200; ++trial)
    {
        const int q = trial % 4;
        const int n = (trial / 4) % 6;
        const std::vector<double> theta = random_phases(5, rng);
        const Eigen::MatrixXcd z = build_z(sc, q, n);
        const Eigen::VectorXcd t_bar = PhaseConfig(theta).t_bar();
        const double lhs = (t_bar.adjoint() * z * t_bar).value().real();

        std::vector<int> one(6, 0);
        one[static_cast<std::size_t>(n)] = 1;
        const double rhs = oracle::direct_snr(sc, q, one, theta) * sc.noise_power();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);

        const double scale = z.norm();
        CHECK((z - z.adjoint()).norm() <= 1e-15 * scale);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(z).eigenvalues().minCoeff() >= -1e-10 * scale);
        CHECK((table.matrix(q, n) - z).norm() <= 1e-14 * scale);
    }

    // Zone matrix sums over active beams
    const std::vector<int> y = {1, 0, 1, 1, 0, 0};
    const Eigen::MatrixXcd sum = table.matrix(2, 0) + table.matrix(2, 2) + table.matrix(2, 3);
    CHECK((table.zone_matrix(2, y) - sum).norm() <= 1e-14 * sum.norm());

    // No RIS path: only the direct term survives
    CellScenario cut = sc;
    cut.channels.ris_to_zone[1].setZero();
    const Eigen::MatrixXcd z0 = build_z(cut, 1, 3);
    const cplx d = (cut.channels.direct[1] * cut.codebook.beams[3]).value();
    CHECK(z0.topLeftCorner(5, 5).norm() == 0.0);
    CHECK(z0.col(5).head(5).norm() == 0.0);
    CHECK(z0(5, 5).real() == std::norm(d));
}

TEST_CASE("Relaxations - P3 structure")
{
    const CellScenario sc = build_scenario(toy_params(4, 3, 2));
    const ZTable table(sc);
    SelectionVector s(4, 3);
    s.y = {1, 1, 0, 0};
    const sdp::SdpProblem p = build_p3(sc, table, s);
    CHECK(p.dim == 2 * 3);
    CHECK(p.constraints.size() == 3 + 3);
    CHECK(p.fixed_entries.empty());
    CHECK(p.objective.norm() == 0.0);
    CHECK(p.num_scalars == 0);

    // r = 0: every zone row has bound 0 and the theta = 0 point satisfies all rows
    const Eigen::MatrixXd x = sdp::hermitian_to_real(PhaseConfig::zeros(2).lifted());
    for (const auto &c : p.constraints)
    {
        if (c.sense == sdp::Sense::greater_equal)
        {
            CHECK(c.bound == 0.0);
            CHECK(row_value(c, x) >= 0.0);
        }
        else
            CHECK(std::abs(row_value(c, x) - c.bound) <= 1e-14);
    }

    // Zone rows read the averaged SNR on rank-one points
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::vector<double> theta = random_phases(2, rng);
        const Eigen::MatrixXd xt = sdp::hermitian_to_real(PhaseConfig(theta).lifted());
        for (int q = 0; q < 3; ++q)
        {
            const double expected = oracle::direct_snr(sc, q, s.y, theta);
            CHECK(std::abs(row_value(p.constraints[q], xt) - expected) <= 1e-10 * expected);
        }
    }
}

TEST_CASE("Relaxations - P3 feasibility matches a phase grid")
{
    // M = N = Q = 1 with a strong RIS link: the relaxation is exact for a 2 x 2 unit-diagonal T
    const CellScenario sc = with_strong_ris(build_scenario(toy_params(1, 1, 1), 2), 0.5);
    const std::vector<int> y = {1};
    double lo = 1e300;
    double hi = 0.0;
    for (int k = 0; k < 360; ++k)
    {
        const double theta = 2.0 * std::numbers::pi * k / 360.0;
        const double v = oracle::direct_snr(sc, 0, y, std::span<const double>(&theta, 1));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    REQUIRE(hi > 2.0 * lo);

    for (double frac : {0.1, 0.5, 0.9, 1.1, 1.5})
    {
        CAPTURE(frac);
        CellScenario s = sc;
        s.params.snr_threshold = frac * hi;
        const ZTable table(s);
        SelectionVector sel(1, 1);
        sel.y = {1};
        sel.r = {1};
        const auto sol = sdp::solve(build_p3(s, table, sel));
        const bool grid_feasible = frac <= 1.0;
        CHECK((sol.status == sdp::SolveStatus::optimal) == grid_feasible);
        CHECK((sol.status == sdp::SolveStatus::infeasible) == !grid_feasible);
    }
}

TEST_CASE("Relaxations - P4 residual bounds a phase grid")
{
    const CellScenario sc = with_strong_ris(build_scenario(toy_params(1, 1, 2), 4), 0.5);
    const ZTable table(sc);
    SelectionVector sel(1, 1);
    sel.y = {1};
    const CoverageState cov(1);
    const sdp::SdpProblem p = build_p4(sc, table, sel, cov);
    REQUIRE(p.num_scalars == 1);
    CHECK(p.scalar_objective(0) == sc.zones[0].weight);

    double grid_best = 0.0;
    std::vector<double> theta(2);
    for (int a = 0; a < 64; ++a)
        for (int b = 0; b < 64; ++b)
        {
            theta[0] = 2.0 * std::numbers::pi * a / 64.0;
            theta[1] = 2.0 * std::numbers::pi * b / 64.0;
            grid_best = std::max(grid_best, oracle::direct_snr(sc, 0, sel.y, theta));
        }

    const auto sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::SolveStatus::optimal);
    const double gamma = sol.scalars(0);
    CHECK(gamma >= grid_best * (1.0 - 1e-5));
    // A rank-one Z makes the relaxation tight up to the grid resolution
    CHECK(gamma <= grid_best * 1.01);
    CHECK(std::abs(sol.objective_value - sc.zones[0].weight * gamma) <= 1e-5 * sol.objective_value);

    // Positive weight scaling scales the optimum
    CellScenario heavy = sc;
    heavy.zones[0].weight *= 3.0;
    const auto sol3 = sdp::solve(build_p4(heavy, table, sel, cov));
    REQUIRE(sol3.status == sdp::SolveStatus::optimal);
    CHECK(std::abs(sol3.objective_value - 3.0 * sol.objective_value) <= 1e-5 * sol3.objective_value);
    CHECK(std::abs(sol3.scalars(0) - gamma) <= 1e-5 * gamma);
}

TEST_CASE("Relaxations - P3 and P4 share their feasible set")
{
    std::mt19937_64 rng(19);
    const CellScenario sc = with_strong_ris(build_scenario(toy_params(4, 3, 3), 5), 0.5);
    const ZTable table(sc);
    CoverageState cov(3);
    cov.covered[2] = 1;
    for (int trial = 0; trial < 20; ++trial)
    {
        const SelectionVector s = random_selection(4, 3, rng, true);
        const sdp::SdpProblem p3 = build_p3(sc, table, s);
        const sdp::SdpProblem p4 = build_p4(sc, table, s, cov);
        REQUIRE(p3.constraints.size() == p4.constraints.size());

        // All claimed zones: no residual terms
        bool all_claimed = s.num_claimed_zones() == 3;
        if (all_claimed)
            CHECK(p4.scalar_objective.norm() == 0.0);
        for (int q = 0; q < 3; ++q)
            if (s.r[q] == 1 || cov.covered[q] == 1)
                CHECK(p4.scalar_objective(q) == 0.0);

        const Eigen::MatrixXd x = sdp::hermitian_to_real(PhaseConfig(random_phases(3, rng)).lifted());
        Eigen::VectorXd gamma = Eigen::VectorXd::Zero(3);
        for (int q = 0; q < 3; ++q)
            if (s.r[q] == 0)
                gamma(q) = row_value(p3.constraints[q], x);
        for (std::size_t k = 0; k < p3.constraints.size(); ++k)
        {
            const double v3 = row_value(p3.constraints[k], x) - p3.constraints[k].bound;
            const double v4 = row_value(p4.constraints[k], x, gamma) - p4.constraints[k].bound;
            // Same sign; rows of unclaimed zones are tight in (P4) with the attained slack as gamma
            if (k < 3 && s.r[k] == 0)
                CHECK(std::abs(v4) <= 1e-12 * (1.0 + std::abs(v3)));
            else
                CHECK(std::abs(v3 - v4) <= 1e-12 * (1.0 + std::abs(v3)));
        }
    }
}
