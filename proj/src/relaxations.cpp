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

#include "risia/relaxations.hpp"

#include <cmath>
#include <numbers>

namespace risia
{

// ---------- Coverage, selection and phase containers ----------

Eigen::MatrixXd CoverageState::weight_matrix(const CellScenario &scenario) const
{
    const int N = scenario.num_beams();
    const int Q = scenario.num_zones();
    if (static_cast<int>(covered.size()) != Q)
        throw std::invalid_argument("Coverage state does not match the number of zones.");
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(N + Q + 1, N + Q + 1);
    for (int q = 0; q < Q; ++q)
        if (covered[q] == 0)
            F(N + q, N + q) = scenario.zones[q].weight;
    return F;
}

double CoverageState::uncovered_weight(const CellScenario &scenario) const
{
    double w = 0.0;
    for (std::size_t q = 0; q < covered.size(); ++q)
        if (covered[q] == 0)
            w += scenario.zones[q].weight;
    return w;
}

int CoverageState::num_uncovered() const
{
    int n = 0;
    for (int c : covered)
        n += c == 0 ? 1 : 0;
    return n;
}

int SelectionVector::num_active_beams() const
{
    int n = 0;
    for (int v : y)
        n += v != 0 ? 1 : 0;
    return n;
}

int SelectionVector::num_claimed_zones() const
{
    int n = 0;
    for (int v : r)
        n += v != 0 ? 1 : 0;
    return n;
}

Eigen::VectorXd SelectionVector::lifted() const
{
    const auto N = static_cast<Eigen::Index>(y.size());
    const auto Q = static_cast<Eigen::Index>(r.size());
    Eigen::VectorXd v(N + Q + 1);
    for (Eigen::Index n = 0; n < N; ++n)
        v(n) = y[n] != 0 ? 1.0 : 0.0;
    for (Eigen::Index q = 0; q < Q; ++q)
        v(N + q) = r[q] != 0 ? 1.0 : 0.0;
    v(N + Q) = 1.0;
    return v;
}

SelectionVector SelectionVector::from_lifted(const Eigen::VectorXd &v, int num_beams, int num_zones)
{
    if (v.size() < num_beams + num_zones)
        throw std::invalid_argument("Lifted vector is too short.");
    SelectionVector s(num_beams, num_zones);
    for (int n = 0; n < num_beams; ++n)
        s.y[n] = v(n) >= 0.5 ? 1 : 0;
    for (int q = 0; q < num_zones; ++q)
        s.r[q] = v(num_beams + q) >= 0.5 ? 1 : 0;
    return s;
}

double wrap_phase(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(angle, two_pi);
    if (a < 0.0)
        a += two_pi;
    if (a >= two_pi)
        a = 0.0;
    return a;
}

PhaseConfig::PhaseConfig(std::vector<double> phases) : theta(std::move(phases))
{
    for (double &a : theta)
    {
        if (!std::isfinite(a))
            throw std::invalid_argument("RIS phase must be finite.");
        a = wrap_phase(a);
    }
}

PhaseConfig PhaseConfig::zeros(int num_elements)
{
    return PhaseConfig(std::vector<double>(static_cast<std::size_t>(num_elements), 0.0));
}

PhaseConfig PhaseConfig::from_lifted(const Eigen::VectorXcd &t_bar)
{
    if (t_bar.size() < 1)
        throw std::invalid_argument("Lifted phase vector cannot be empty.");
    const Eigen::Index M = t_bar.size() - 1;
    const cplx ref = t_bar(M);
    std::vector<double> phases(static_cast<std::size_t>(M));
    for (Eigen::Index i = 0; i < M; ++i)
        phases[i] = -std::arg(t_bar(i) / ref); // t_i = e^{-j theta_i}
    return PhaseConfig(std::move(phases));
}

Eigen::VectorXcd PhaseConfig::t() const
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = std::polar(1.0, -theta[i]);
    return v;
}

Eigen::VectorXcd PhaseConfig::t_bar() const
{
    const auto M = static_cast<Eigen::Index>(theta.size());
    Eigen::VectorXcd v(M + 1);
    v.head(M) = t();
    v(M) = 1.0;
    return v;
}

Eigen::MatrixXcd PhaseConfig::lifted() const
{
    const Eigen::VectorXcd tb = t_bar();
    return tb * tb.adjoint();
}

// ---------- (P2) ----------

Eigen::MatrixXd p2_gain_matrix(const CellScenario &scenario, const Eigen::MatrixXd &gains, int zone)
{
    const int N = scenario.num_beams();
    const int S = N + scenario.num_zones();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(S + 1, S + 1);
    for (int n = 0; n < N; ++n)
    {
        const double b = 0.5 * gains(zone, n); // [b_q]_n
        A(n, S) = b;
        A(S, n) = b;
    }
    return A;
}

Eigen::MatrixXd p2_threshold_matrix(const CellScenario &scenario, int zone)
{
    const int N = scenario.num_beams();
    const int S = N + scenario.num_zones();
    const double c = 0.5 * scenario.snr_threshold() * scenario.noise_power();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(S + 1, S + 1);
    for (int n = 0; n < N; ++n)
    {
        C(N + zone, n) = c;
        C(n, N + zone) = c;
    }
    return C;
}

Eigen::MatrixXd p2_binary_matrix(int num_beams, int num_zones, int index)
{
    const int S = num_beams + num_zones;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(S + 1, S + 1);
    H(index, index) = 1.0;
    H(index, S) = -0.5;
    H(S, index) = -0.5;
    return H;
}

sdp::SdpProblem build_p2(const CellScenario &scenario, std::span<const double> phases,
                         const CoverageState &coverage, const P2Options &options)
{
    const int N = scenario.num_beams();
    const int Q = scenario.num_zones();
    const int S = N + Q;
    const Eigen::MatrixXd gains = beam_gains(scenario, phases);
    const double inv_noise = 1.0 / scenario.noise_power();

    sdp::SdpProblem p;
    p.dim = S + 1;
    p.objective = coverage.weight_matrix(scenario);

    for (int q = 0; q < Q; ++q)
    {
        sdp::Constraint con;
        con.a = inv_noise * (p2_gain_matrix(scenario, gains, q) - p2_threshold_matrix(scenario, q));
        con.sense = sdp::Sense::greater_equal;
        con.bound = 0.0;
        p.constraints.push_back(std::move(con));
    }
    for (int i = 0; i < S; ++i)
    {
        sdp::Constraint con;
        con.a = p2_binary_matrix(N, Q, i);
        con.sense = sdp::Sense::equal;
        con.bound = 0.0;
        p.constraints.push_back(std::move(con));
    }
    if (options.require_active_beam)
    {
        sdp::Constraint con;
        con.a = Eigen::MatrixXd::Zero(S + 1, S + 1);
        for (int n = 0; n < N; ++n)
        {
            con.a(n, S) = 0.5;
            con.a(S, n) = 0.5;
        }
        con.sense = sdp::Sense::greater_equal;
        con.bound = 1.0;
        p.constraints.push_back(std::move(con));
    }
    if (options.require_active_beam && options.lift_active_beam)
    {
        for (int q = 0; q < Q; ++q)
        {
            sdp::Constraint con;
            con.a = Eigen::MatrixXd::Zero(S + 1, S + 1);
            for (int n = 0; n < N; ++n)
            {
                con.a(N + q, n) = 0.5;
                con.a(n, N + q) = 0.5;
            }
            con.a(N + q, S) = -0.5;
            con.a(S, N + q) = -0.5;
            con.sense = sdp::Sense::greater_equal;
            con.bound = 0.0;
            p.constraints.push_back(std::move(con));
        }
    }
    p.fixed_entries.push_back({S, S, 1.0});
    return p;
}

// ---------- (P3)/(P4) ----------

ZTable::ZTable(const CellScenario &scenario)
    : num_zones_(scenario.num_zones()), num_beams_(scenario.num_beams()), dim_(scenario.num_ris_elements() + 1)
{
    const int M = dim_ - 1;
    gens_.reserve(static_cast<std::size_t>(num_zones_) * static_cast<std::size_t>(num_beams_));
    for (int q = 0; q < num_zones_; ++q)
    {
        const Eigen::MatrixXcd omega = cascaded_channel(scenario, q);
        for (int n = 0; n < num_beams_; ++n)
        {
            const Eigen::VectorXcd &b = scenario.codebook.beams[n];
            Eigen::VectorXcd g(M + 1);
            if (M > 0)
                g.head(M) = omega * b;
            g(M) = (scenario.channels.direct[q] * b).value();
            gens_.push_back(std::move(g));
        }
    }
}

Eigen::MatrixXcd ZTable::matrix(int zone, int beam) const
{
    const Eigen::VectorXcd &g = generator(zone, beam);
    return g * g.adjoint();
}

Eigen::MatrixXcd ZTable::zone_matrix(int zone, std::span<const int> beam_indicators) const
{
    if (static_cast<int>(beam_indicators.size()) != num_beams_)
        throw std::invalid_argument("Beam indicator length must equal the number of beams.");
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int n = 0; n < num_beams_; ++n)
    {
        if (beam_indicators[n] == 0)
            continue;
        const Eigen::VectorXcd &g = generator(zone, n);
        z.noalias() += g * g.adjoint();
    }
    return z;
}

Eigen::MatrixXcd build_z(const CellScenario &scenario, int zone, int beam)
{
    const Eigen::MatrixXcd omega = cascaded_channel(scenario, zone);
    const Eigen::VectorXcd &b = scenario.codebook.beams[beam];
    const Eigen::RowVectorXcd &hd = scenario.channels.direct[zone]; // h_{d,q}^H
    const int M = scenario.num_ris_elements();

    const Eigen::VectorXcd ob = omega * b;
    const cplx direct = (hd * b).value(); // h_{d,q}^H b_n

    Eigen::MatrixXcd Z(M + 1, M + 1);
    Z.topLeftCorner(M, M) = ob * ob.adjoint();
    Z.topRightCorner(M, 1) = std::conj(direct) * ob;             // (b_n^H h_{d,q}) Omega_q b_n
    Z.bottomLeftCorner(1, M) = direct * ob.adjoint();            // (h_{d,q}^H b_n) b_n^H Omega_q^H
    Z(M, M) = std::norm(direct);
    return Z;
}

namespace
{

sdp::SdpProblem phase_problem_skeleton(const CellScenario &scenario, const ZTable &z, const SelectionVector &selection,
                                       bool with_residuals)
{
    const int Q = scenario.num_zones();
    const int D = z.dim();
    if (static_cast<int>(selection.y.size()) != scenario.num_beams() || static_cast<int>(selection.r.size()) != Q)
        throw std::invalid_argument("Selection vector does not match the scenario.");

    const int active = selection.num_active_beams();
    // Real embedding doubles traces: tr(embed(A) embed(B)) = 2 Re tr(A B).
    const double row_scale = 0.5 / (scenario.noise_power() * std::max(active, 1));

    sdp::SdpProblem p;
    p.dim = 2 * D;
    p.objective = Eigen::MatrixXd::Zero(2 * D, 2 * D);
    if (with_residuals)
    {
        p.num_scalars = Q;
        p.scalar_objective = Eigen::VectorXd::Zero(Q);
    }

    for (int q = 0; q < Q; ++q)
    {
        sdp::Constraint con;
        con.a = row_scale * sdp::hermitian_to_real(z.zone_matrix(q, selection.y));
        con.sense = sdp::Sense::greater_equal;
        con.bound = selection.r[q] != 0 ? scenario.snr_threshold() : 0.0;
        if (with_residuals)
        {
            con.scalar_coeffs = Eigen::VectorXd::Zero(Q);
            if (selection.r[q] == 0)
                con.scalar_coeffs(q) = -1.0;
        }
        p.constraints.push_back(std::move(con));
    }
    for (int i = 0; i < D; ++i)
    {
        sdp::Constraint con;
        con.a = Eigen::MatrixXd::Zero(2 * D, 2 * D);
        con.a(i, i) = 1.0;
        con.a(D + i, D + i) = 1.0;
        con.sense = sdp::Sense::equal;
        con.bound = 2.0;
        p.constraints.push_back(std::move(con));
    }
    return p;
}

} // namespace

sdp::SdpProblem build_p3(const CellScenario &scenario, const ZTable &z, const SelectionVector &selection)
{
    return phase_problem_skeleton(scenario, z, selection, false);
}

sdp::SdpProblem build_p4(const CellScenario &scenario, const ZTable &z, const SelectionVector &selection,
                         const CoverageState &coverage)
{
    sdp::SdpProblem p = phase_problem_skeleton(scenario, z, selection, true);
    const int Q = scenario.num_zones();
    if (static_cast<int>(coverage.covered.size()) != Q)
        throw std::invalid_argument("Coverage state does not match the number of zones.");
    for (int q = 0; q < Q; ++q)
        if (selection.r[q] == 0 && coverage.covered[q] == 0)
            p.scalar_objective(q) = scenario.zones[q].weight;
    return p;
}

Eigen::MatrixXcd deembed_phase_matrix(const Eigen::MatrixXd &x)
{
    return sdp::real_to_hermitian(x);
}

} // namespace risia
