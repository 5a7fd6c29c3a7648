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

#include "risia/geometry.hpp"
#include "risia/rng.hpp"

#include <algorithm>
#include <cmath>

namespace risia
{

namespace
{

constexpr double pi = std::numbers::pi;

// Angle in [0, pi] between an array axis (given by its azimuth) and the direction from -> to.
double angle_from_axis(double axis_azimuth, Point2 from, Point2 to)
{
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0)
        return 0.5 * pi;
    const double c = (dx * std::cos(axis_azimuth) + dy * std::sin(axis_azimuth)) / len;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Mass of an annular sector under the user density, midpoint rule in polar coordinates.
double sector_mass(const UserDensity &density, double r1, double r2, double a1, double a2)
{
    constexpr int steps = 64;
    const double dr = (r2 - r1) / steps;
    const double da = (a2 - a1) / steps;
    double mass = 0.0;
    for (int i = 0; i < steps; ++i)
    {
        const double r = r1 + (i + 0.5) * dr;
        for (int j = 0; j < steps; ++j)
            mass += density(r, a1 + (j + 0.5) * da) * r;
    }
    return mass * dr * da;
}

} // namespace

void ScenarioParams::validate() const
{
    if (num_zones < 1 || num_bs_antennas < 1 || num_beams < 1 || num_users < 1)
        throw std::invalid_argument("Zone, antenna, beam and user counts must be at least 1.");
    if (num_ris_elements < 0)
        throw std::invalid_argument("Number of RIS elements cannot be negative.");
    if (num_rings < 0)
        throw std::invalid_argument("Number of rings cannot be negative.");
    if (!(cell_radius > 0.0) || !std::isfinite(cell_radius))
        throw std::invalid_argument("Cell radius must be positive.");
    if (!(transmit_power > 0.0) || !(noise_power > 0.0) || !(ref_path_loss > 0.0))
        throw std::invalid_argument("Transmit power, noise power and reference path loss must be positive.");
    if (!(ref_distance > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("Reference distance and wavelength must be positive.");
    if (!std::isfinite(decay_exponent) || decay_exponent < 0.0)
        throw std::invalid_argument("Decay exponent must be finite and non-negative.");
    if (bs_spacing < 0.0 || ris_spacing < 0.0)
        throw std::invalid_argument("Antenna spacing cannot be negative.");
    if (!(sector_extent > 0.0) || sector_extent > 2.0 * pi)
        throw std::invalid_argument("Sector extent must be in (0, 2 pi].");
    if (!(snr_threshold >= 0.0) || !std::isfinite(snr_threshold))
        throw std::invalid_argument("SNR threshold must be finite and non-negative.");
}

Eigen::VectorXcd steering_vector(double phase_diff, int length)
{
    if (length < 1)
        throw std::invalid_argument("Steering vector length must be at least 1.");
    if (!std::isfinite(phase_diff))
        throw std::invalid_argument("Steering vector phase difference must be finite.");

    const double phi = phase_diff - 2.0 * std::floor(phase_diff / 2.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(length));
    Eigen::VectorXcd a(length);
    for (int i = 0; i < length; ++i)
        a(i) = scale * std::polar(1.0, pi * phi * i);
    return a;
}

double path_loss(double distance, const ScenarioParams &params)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("Path loss distance must be positive.");
    return params.ref_path_loss * std::pow(distance / params.ref_distance, -params.decay_exponent);
}

int default_ring_count(int num_zones)
{
    // Largest divisor r of Q with r^2 <= Q / 2.5; gives 4 x 10 for Q = 40.
    int rings = 1;
    for (int r = 1; r * r * 5 <= 2 * num_zones; ++r)
        if (num_zones % r == 0)
            rings = r;
    return rings;
}

CellScenario build_scenario(const ScenarioParams &params, std::uint64_t zone_layout_seed)
{
    params.validate();

    const int Q = params.num_zones;
    const int rings = params.num_rings > 0 ? params.num_rings : default_ring_count(Q);
    if (Q % rings != 0)
        throw std::invalid_argument("Number of zones " + std::to_string(Q) + " is not divisible into " +
                                    std::to_string(rings) + " rings.");
    const int sectors = Q / rings;

    CellScenario sc;
    sc.params = params;

    const double R = params.cell_radius;
    const double a0 = params.sector_start;
    const double extent = params.sector_extent;
    const double wedge = extent / sectors;

    // ---------- Zones ----------
    // Rings have equal area, so a uniform user density gives equal weights.
    std::vector<double> masses;
    for (int ring = 0; ring < rings; ++ring)
    {
        const double r1 = R * std::sqrt(static_cast<double>(ring) / rings);
        const double r2 = R * std::sqrt(static_cast<double>(ring + 1) / rings);
        for (int s = 0; s < sectors; ++s)
        {
            Zone z;
            z.index = static_cast<int>(sc.zones.size());
            z.inner_radius = r1;
            z.outer_radius = r2;
            z.start_azimuth = a0 + s * wedge;
            z.end_azimuth = a0 + (s + 1) * wedge;

            // Area centroid of the annular sector
            const double half = 0.5 * wedge;
            const double rc = (2.0 / 3.0) * (r2 * r2 * r2 - r1 * r1 * r1) / (r2 * r2 - r1 * r1) * std::sin(half) / half;
            const double mid = z.start_azimuth + half;
            z.centroid = {rc * std::cos(mid), rc * std::sin(mid)};

            if (params.user_density)
                masses.push_back(sector_mass(params.user_density, r1, r2, z.start_azimuth, z.end_azimuth));
            else
                masses.push_back(0.5 * wedge * (r2 * r2 - r1 * r1));
            sc.zones.push_back(z);
        }
    }
    double total_mass = 0.0;
    for (double m : masses)
        total_mass += m;
    if (!(total_mass > 0.0))
        throw std::invalid_argument("User density integrates to zero over the cell.");
    for (int q = 0; q < Q; ++q)
        sc.zones[q].weight = params.num_users * masses[q] / total_mass;

    // ---------- RIS placement ----------
    double ris_azimuth = params.ris_azimuth;
    if (zone_layout_seed != 0)
    {
        CounterRng rng(zone_layout_seed, 0x5249534c41594f55ULL);
        ris_azimuth = a0 + extent * rng.uniform();
    }
    sc.ris_position = {R * std::cos(ris_azimuth), R * std::sin(ris_azimuth)};
    sc.ris_axis_azimuth = ris_azimuth + 0.5 * pi; // tangent to the cell edge, facing the BS

    const Point2 bs{0.0, 0.0};
    const double bs_axis = 0.0;
    for (auto &z : sc.zones)
    {
        z.distance_to_bs = std::max(distance(bs, z.centroid), params.ref_distance);
        z.distance_to_ris = std::max(distance(sc.ris_position, z.centroid), params.ref_distance);
        z.aod_bs = angle_from_axis(bs_axis, bs, z.centroid);
        z.aod_ris = angle_from_axis(sc.ris_axis_azimuth, sc.ris_position, z.centroid);
    }

    // ---------- Beams and channels ----------
    const int Na = params.num_bs_antennas;
    const int M = params.num_ris_elements;
    const int N = params.num_beams;
    const double bs_ratio = 2.0 * params.effective_bs_spacing() / params.wavelength;
    const double ris_ratio = 2.0 * params.effective_ris_spacing() / params.wavelength;

    for (int n = 0; n < N; ++n)
    {
        const double aod = a0 + (n + 0.5) * extent / N;
        sc.codebook.beam_aods.push_back(aod);
        sc.codebook.beams.push_back(std::sqrt(params.transmit_power) * steering_vector(bs_ratio * std::cos(aod), Na));
    }

    auto &ch = sc.channels;
    ch.bs_ris_distance = std::max(distance(bs, sc.ris_position), params.ref_distance);
    ch.ris_aod_bs = angle_from_axis(bs_axis, bs, sc.ris_position);
    ch.ris_aoa = angle_from_axis(sc.ris_axis_azimuth, sc.ris_position, bs);

    if (M > 0)
    {
        const Eigen::VectorXcd a_ris = steering_vector(ris_ratio * std::cos(ch.ris_aoa), M);
        const Eigen::VectorXcd a_bs = steering_vector(bs_ratio * std::cos(ch.ris_aod_bs), Na);
        ch.bs_to_ris = std::sqrt(M * Na * path_loss(ch.bs_ris_distance, params)) * (a_ris * a_bs.adjoint());
    }
    else
        ch.bs_to_ris.resize(0, Na);

    for (const auto &z : sc.zones)
    {
        const Eigen::VectorXcd a_d = steering_vector(bs_ratio * std::cos(z.aod_bs), Na);
        ch.direct.push_back(std::sqrt(Na * path_loss(z.distance_to_bs, params)) * a_d.adjoint());
        if (M > 0)
        {
            const Eigen::VectorXcd a_r = steering_vector(ris_ratio * std::cos(z.aod_ris), M);
            ch.ris_to_zone.push_back(std::sqrt(M * path_loss(z.distance_to_ris, params)) * a_r.adjoint());
        }
        else
            ch.ris_to_zone.push_back(Eigen::RowVectorXcd(0));
    }
    return sc;
}

Eigen::VectorXcd ris_coefficients(std::span<const double> phases)
{
    Eigen::VectorXcd c(static_cast<Eigen::Index>(phases.size()));
    for (std::size_t i = 0; i < phases.size(); ++i)
        c(static_cast<Eigen::Index>(i)) = std::polar(1.0, phases[i]);
    return c;
}

Eigen::RowVectorXcd effective_channel(const CellScenario &scenario, int zone, std::span<const double> phases)
{
    const auto &ch = scenario.channels;
    const int M = scenario.num_ris_elements();
    if (zone < 0 || zone >= scenario.num_zones())
        throw std::out_of_range("Zone index out of range.");
    if (!phases.empty() && static_cast<int>(phases.size()) != M)
        throw std::invalid_argument("Phase vector length must equal the number of RIS elements.");
    if (M == 0)
        return ch.direct[zone];

    Eigen::RowVectorXcd reflected = ch.ris_to_zone[zone];
    if (!phases.empty())
        reflected = reflected.cwiseProduct(ris_coefficients(phases).transpose());
    return reflected * ch.bs_to_ris + ch.direct[zone];
}

Eigen::MatrixXcd cascaded_channel(const CellScenario &scenario, int zone)
{
    const auto &ch = scenario.channels;
    return ch.ris_to_zone[zone].transpose().asDiagonal() * ch.bs_to_ris;
}

Eigen::MatrixXd beam_gains(const CellScenario &scenario, std::span<const double> phases)
{
    const int Q = scenario.num_zones();
    const int N = scenario.num_beams();
    Eigen::MatrixXd gains(Q, N);
    for (int q = 0; q < Q; ++q)
    {
        const Eigen::RowVectorXcd h = effective_channel(scenario, q, phases);
        for (int n = 0; n < N; ++n)
            gains(q, n) = std::norm((h * scenario.codebook.beams[n]).value());
    }
    return gains;
}

double snr_from_gains(const Eigen::MatrixXd &gains, int zone, std::span<const int> beam_indicators, double noise_power)
{
    if (static_cast<Eigen::Index>(beam_indicators.size()) != gains.cols())
        throw std::invalid_argument("Beam indicator length must equal the number of beams.");
    double received = 0.0;
    int active = 0;
    for (std::size_t n = 0; n < beam_indicators.size(); ++n)
    {
        if (beam_indicators[n] != 0)
        {
            received += gains(zone, static_cast<Eigen::Index>(n));
            ++active;
        }
    }
    if (active == 0)
        throw undefined_snr("SNR is undefined when no beam is active.");
    return received / (noise_power * active);
}

double snr(const CellScenario &scenario, int zone, std::span<const int> beam_indicators, std::span<const double> phases)
{
    const Eigen::RowVectorXcd h = effective_channel(scenario, zone, phases);
    const int N = scenario.num_beams();
    if (static_cast<int>(beam_indicators.size()) != N)
        throw std::invalid_argument("Beam indicator length must equal the number of beams.");
    double received = 0.0;
    int active = 0;
    for (int n = 0; n < N; ++n)
    {
        if (beam_indicators[n] == 0)
            continue;
        received += std::norm((h * scenario.codebook.beams[n]).value());
        ++active;
    }
    if (active == 0)
        throw undefined_snr("SNR is undefined when no beam is active.");
    return received / (scenario.noise_power() * active);
}

} // namespace risia

namespace risia
{

namespace
{

nlohmann::json interleave(const Eigen::MatrixXcd &m)
{
    // Row-major, [re, im, re, im, ...]
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
        {
            arr.push_back(m(i, j).real());
            arr.push_back(m(i, j).imag());
        }
    return arr;
}

} // namespace

nlohmann::json to_json(const CellScenario &scenario)
{
    const auto &p = scenario.params;
    nlohmann::json j;
    j["params"] = {{"cell_radius", p.cell_radius},
                   {"num_zones", p.num_zones},
                   {"num_bs_antennas", p.num_bs_antennas},
                   {"num_beams", p.num_beams},
                   {"num_ris_elements", p.num_ris_elements},
                   {"transmit_power", p.transmit_power},
                   {"noise_power", p.noise_power},
                   {"ref_path_loss", p.ref_path_loss},
                   {"ref_distance", p.ref_distance},
                   {"decay_exponent", p.decay_exponent},
                   {"wavelength", p.wavelength},
                   {"bs_spacing", p.effective_bs_spacing()},
                   {"ris_spacing", p.effective_ris_spacing()},
                   {"num_users", p.num_users},
                   {"snr_threshold", p.snr_threshold}};
    j["ris_position"] = {scenario.ris_position.x, scenario.ris_position.y};
    j["ris_axis_azimuth"] = scenario.ris_axis_azimuth;

    nlohmann::json zones = nlohmann::json::array();
    for (const auto &z : scenario.zones)
        zones.push_back({{"index", z.index},
                         {"centroid", {z.centroid.x, z.centroid.y}},
                         {"weight", z.weight},
                         {"distance_to_bs", z.distance_to_bs},
                         {"distance_to_ris", z.distance_to_ris},
                         {"aod_bs", z.aod_bs},
                         {"aod_ris", z.aod_ris}});
    j["zones"] = zones;

    const auto &ch = scenario.channels;
    nlohmann::json direct = nlohmann::json::array();
    nlohmann::json reflected = nlohmann::json::array();
    for (std::size_t q = 0; q < ch.direct.size(); ++q)
    {
        direct.push_back(interleave(ch.direct[q]));
        reflected.push_back(interleave(ch.ris_to_zone[q]));
    }
    j["channels"] = {{"direct", direct},
                     {"ris_to_zone", reflected},
                     {"bs_to_ris", interleave(ch.bs_to_ris)},
                     {"bs_to_ris_shape", {ch.bs_to_ris.rows(), ch.bs_to_ris.cols()}},
                     {"ris_aod_bs", ch.ris_aod_bs},
                     {"ris_aoa", ch.ris_aoa},
                     {"bs_ris_distance", ch.bs_ris_distance}};

    nlohmann::json beams = nlohmann::json::array();
    for (const auto &b : scenario.codebook.beams)
        beams.push_back(interleave(b.transpose()));
    j["codebook"] = {{"beams", beams}, {"beam_aods", scenario.codebook.beam_aods}};
    return j;
}

} // namespace risia
