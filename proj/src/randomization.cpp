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

#include "risia/randomization.hpp"
#include "risia/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace risia
{

namespace
{

constexpr double inf = std::numeric_limits<double>::infinity();

CounterRng trial_rng(std::uint64_t seed, std::uint64_t stream_key, int trial)
{
    return CounterRng(seed, CounterRng::mix(stream_key) ^ static_cast<std::uint64_t>(trial));
}

// Covariance square root with negative eigenvalues clamped at zero.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd &cov)
{
    const sdp::SymmetricEigen<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()),
                                                  "Eigendecomposition of the sampling covariance failed.");
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Lexicographically smallest y, then smallest r.
bool preferred_on_tie(const SelectionVector &a, const SelectionVector &b)
{
    if (a.y != b.y)
        return std::lexicographical_compare(a.y.begin(), a.y.end(), b.y.begin(), b.y.end());
    return std::lexicographical_compare(a.r.begin(), a.r.end(), b.r.begin(), b.r.end());
}

} // namespace

void RoundingConfig::validate() const
{
    if (trials_p2 < 1 || trials_phase < 1)
        throw std::invalid_argument("Randomization trial counts must be at least 1.");
    if (!(feasibility_tol >= 0.0) || !(rank_one_tol > 0.0))
        throw std::invalid_argument("Rounding tolerances must be non-negative.");
}

double selection_objective(const CellScenario &scenario, const CoverageState &coverage, const SelectionVector &s)
{
    double f = 0.0;
    for (int q = 0; q < scenario.num_zones(); ++q)
        if (s.r[q] != 0 && coverage.covered[q] == 0)
            f += scenario.zones[q].weight;
    return f;
}

double selection_violation(const CellScenario &scenario, const Eigen::MatrixXd &gains, const SelectionVector &s,
                           double feasibility_tol)
{
    const int claimed = s.num_claimed_zones();
    if (claimed == 0)
        return 0.0;
    const int active = s.num_active_beams();
    if (active == 0)
        return static_cast<double>(claimed); // SNR undefined, every claim fails
    const double tau = scenario.snr_threshold();
    const double floor = tau * (1.0 - feasibility_tol);
    double violation = 0.0;
    for (int q = 0; q < scenario.num_zones(); ++q)
    {
        if (s.r[q] == 0)
            continue;
        const double value = snr_from_gains(gains, q, s.y, scenario.noise_power());
        if (value < floor)
            violation += tau > 0.0 ? (tau - value) / tau : 1.0;
    }
    return violation;
}

P2Rounding round_p2(const Eigen::MatrixXd &v_star, const CellScenario &scenario, std::span<const double> phases,
                    const CoverageState &coverage, const RoundingConfig &cfg, std::uint64_t stream_key)
{
    cfg.validate();
    const int N = scenario.num_beams();
    const int Q = scenario.num_zones();
    const int S = N + Q;
    if (v_star.rows() != S + 1 || v_star.cols() != S + 1)
        throw std::invalid_argument("Relaxed (P2) solution has the wrong dimension.");

    P2Rounding out;

    // Nothing left to cover: every feasible selection is optimal; return the canonical one.
    if (coverage.all_covered())
    {
        out.selection = SelectionVector(N, Q);
        out.selection.y[0] = 1;
        out.feasible = true;
        return out;
    }

    const Eigen::MatrixXd gains = beam_gains(scenario, phases);
    bool have_best = false;
    auto consider = [&](const SelectionVector &cand)
    {
        const double violation = selection_violation(scenario, gains, cand, cfg.feasibility_tol);
        const bool feasible = violation == 0.0 && cand.num_active_beams() >= 1;
        const double objective = selection_objective(scenario, coverage, cand);
        const double total_violation = violation + (cand.num_active_beams() == 0 ? 1.0 : 0.0);
        if (feasible)
            ++out.feasible_trials;

        bool take = false;
        if (!have_best)
            take = true;
        else if (feasible != out.feasible)
            take = feasible;
        else if (feasible)
            take = objective > out.objective || (objective == out.objective && preferred_on_tie(cand, out.selection));
        else
            take = total_violation < out.violation ||
                   (total_violation == out.violation && preferred_on_tie(cand, out.selection));
        if (take)
        {
            out.selection = cand;
            out.feasible = feasible;
            out.objective = objective;
            out.violation = feasible ? 0.0 : total_violation;
            have_best = true;
        }
    };

    // Rank-one shortcut: V* = v v^T already encodes a binary vector.
    const sdp::SymmetricEigen<Eigen::MatrixXd> es(0.5 * (v_star + v_star.transpose()),
                                                  "Eigendecomposition of the relaxed (P2) solution failed.");
    const Eigen::VectorXd &evals = es.eigenvalues();
    const double top = evals(S);
    if (top > 0.0 && (S == 0 || std::max(evals(S - 1), 0.0) <= cfg.rank_one_tol * top))
    {
        Eigen::VectorXd v = es.eigenvectors().col(S);
        if (v(S) != 0.0)
        {
            v /= v(S);
            consider(SelectionVector::from_lifted(v, N, Q));
            out.rank_one = true;
            if (out.feasible)
                return out;
        }
    }

    Eigen::MatrixXd cov = v_star.topLeftCorner(S, S);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(S);
    double threshold = 0.0;
    if (cfg.binary_sampling == BinarySampling::moment_matched)
    {
        mean = v_star.col(S).head(S) / std::max(v_star(S, S), 1e-300);
        cov -= mean * mean.transpose();
        threshold = 0.5;
    }
    const Eigen::MatrixXd factor = covariance_factor(cov);

    const double floor = scenario.snr_threshold() * (1.0 - cfg.feasibility_tol);
    Eigen::VectorXd xi(S), sample(S);
    SelectionVector cand(N, Q);
    SelectionVector completed(N, Q);
    std::vector<int> order(static_cast<std::size_t>(N));
    auto complete = [&](SelectionVector &s)
    {
        for (int q = 0; q < Q; ++q)
            s.r[q] = coverage.covered[q] == 0 && snr_from_gains(gains, q, s.y, scenario.noise_power()) >= floor ? 1 : 0;
    };
    for (int trial = 0; trial < cfg.trials_p2; ++trial)
    {
        CounterRng rng = trial_rng(cfg.rng_seed, stream_key, trial);
        for (int j = 0; j < S; ++j)
            xi(j) = rng.normal();
        sample.noalias() = factor * xi;
        sample += mean;
        for (int n = 0; n < N; ++n)
            cand.y[n] = sample(n) < threshold ? 0 : 1;
        for (int q = 0; q < Q; ++q)
            cand.r[q] = sample(N + q) < threshold ? 0 : 1;
        consider(cand);

        if (cfg.complete_zones && cand.num_active_beams() > 0)
        {
            completed.y = cand.y;
            complete(completed);
            if (completed.r != cand.r)
                consider(completed);
        }

        if (cfg.threshold_sweep)
        {
            for (int n = 0; n < N; ++n)
                order[n] = n;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sample(a) > sample(b); });
            std::fill(completed.y.begin(), completed.y.end(), 0);
            for (int k = 0; k < N; ++k)
            {
                completed.y[order[k]] = 1;
                complete(completed);
                consider(completed);
            }
        }
    }
    return out;
}

Eigen::VectorXd zone_snrs(const PhaseContext &ctx, const Eigen::VectorXcd &t_bar)
{
    const int Q = ctx.scenario.num_zones();
    const int N = ctx.scenario.num_beams();
    const int active = ctx.selection.num_active_beams();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Q);
    if (active == 0)
        return out;
    for (int q = 0; q < Q; ++q)
    {
        double received = 0.0;
        for (int n = 0; n < N; ++n)
            if (ctx.selection.y[n] != 0)
                received += std::norm(t_bar.dot(ctx.z.generator(q, n))); // t_bar^H g
        out(q) = received / (ctx.scenario.noise_power() * active);
    }
    return out;
}

PhaseRounding round_phase(const Eigen::MatrixXcd &t_star, PhaseProblem kind, const PhaseContext &ctx,
                          const RoundingConfig &cfg, std::uint64_t stream_key)
{
    cfg.validate();
    const int D = ctx.z.dim();
    const int M = D - 1;
    const int Q = ctx.scenario.num_zones();
    if (t_star.rows() != D || t_star.cols() != D)
        throw std::invalid_argument("Relaxed phase solution has the wrong dimension.");

    const double tau = ctx.scenario.snr_threshold();
    const double floor = tau * (1.0 - cfg.feasibility_tol);

    PhaseRounding out;
    bool have_best = false;

    auto consider = [&](const Eigen::VectorXcd &t_tilde)
    {
        if (std::abs(t_tilde(M)) == 0.0)
            return;
        PhaseConfig phases = PhaseConfig::from_lifted(t_tilde);
        const Eigen::VectorXd snrs = zone_snrs(ctx, phases.t_bar());

        double violation = 0.0;
        double min_slack = inf;
        double residual = 0.0;
        for (int q = 0; q < Q; ++q)
        {
            if (ctx.selection.r[q] != 0)
            {
                if (snrs(q) < floor)
                    violation += tau > 0.0 ? (tau - snrs(q)) / tau : 1.0;
                min_slack = std::min(min_slack, tau > 0.0 ? snrs(q) / tau - 1.0 : snrs(q));
            }
            else if (ctx.coverage.covered[q] == 0)
                residual += ctx.scenario.zones[q].weight * snrs(q);
        }
        if (ctx.selection.num_claimed_zones() > 0 && ctx.selection.num_active_beams() == 0)
            violation += 1.0;
        const bool feasible = violation == 0.0;
        const double objective = kind == PhaseProblem::p4 ? residual : min_slack;
        if (feasible)
            ++out.feasible_trials;

        bool take = false;
        if (!have_best)
            take = true;
        else if (feasible != out.feasible)
            take = feasible;
        else if (feasible)
            take = objective > out.objective;
        else
            take = violation < out.violation;
        if (take)
        {
            out.phases = std::move(phases);
            out.feasible = feasible;
            out.objective = objective;
            out.violation = violation;
            have_best = true;
        }
    };

    const Eigen::MatrixXcd herm = 0.5 * (t_star + t_star.adjoint());
    const sdp::SymmetricEigen<Eigen::MatrixXcd> es(herm, "Eigendecomposition of the relaxed phase solution failed.");
    const Eigen::VectorXd &evals = es.eigenvalues();
    const double top = evals(D - 1);
    if (top > 0.0 && (D == 1 || std::max(evals(D - 2), 0.0) <= cfg.rank_one_tol * top))
    {
        consider(es.eigenvectors().col(D - 1));
        out.rank_one = true;
        if (out.feasible)
            return out;
    }

    const Eigen::MatrixXcd factor = es.eigenvectors() * evals.cwiseMax(0.0).cwiseSqrt().asDiagonal().toDenseMatrix().cast<cplx>();
    Eigen::VectorXcd r(D), t_hat(D);
    const double half = std::sqrt(0.5);
    for (int trial = 0; trial < cfg.trials_phase; ++trial)
    {
        CounterRng rng = trial_rng(cfg.rng_seed, stream_key, trial);
        for (int i = 0; i < D; ++i)
        {
            const double re = rng.normal();
            const double im = rng.normal();
            r(i) = cplx(half * re, half * im);
        }
        t_hat.noalias() = factor * r;
        consider(t_hat);
    }
    return out;
}

} // namespace risia
