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

#include "oracles/brute_force.hpp"
#include "risia/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risia::oracle
{

double direct_snr(const CellScenario &scenario, int zone, std::span<const int> beams, std::span<const double> theta)
{
    const ChannelSet &ch = scenario.channels;
    const int Na = scenario.params.num_bs_antennas;
    const int M = scenario.num_ris_elements();
    double received = 0.0;
    int active = 0;
    for (std::size_t n = 0; n < beams.size(); ++n)
    {
        if (beams[n] == 0)
            continue;
        ++active;
        const Eigen::VectorXcd &b = scenario.codebook.beams[n];
        std::complex<double> amplitude = 0.0;
        for (int a = 0; a < Na; ++a)
        {
            std::complex<double> h = ch.direct[zone](a);
            for (int m = 0; m < M; ++m)
                h += ch.ris_to_zone[zone](m) * std::polar(1.0, theta[m]) * ch.bs_to_ris(m, a);
            amplitude += h * b(a);
        }
        received += std::norm(amplitude);
    }
    if (active == 0)
        throw std::invalid_argument("no active beam");
    return received / (scenario.params.noise_power * active);
}

namespace
{

double subset_objective(const CellScenario &scenario, const CoverageState &coverage, std::span<const int> beams,
                        std::span<const double> theta)
{
    const double tau = scenario.params.snr_threshold;
    double f = 0.0;
    for (int q = 0; q < scenario.num_zones(); ++q)
        if (coverage.covered[q] == 0 && direct_snr(scenario, q, beams, theta) >= tau)
            f += scenario.zones[q].weight;
    return f;
}

std::vector<int> subset_bits(unsigned mask, int n)
{
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        y[i] = (mask >> i) & 1u;
    return y;
}

} // namespace

SlotOptimum best_slot(const CellScenario &scenario, const CoverageState &coverage, int grid_points)
{
    const int N = scenario.num_beams();
    const int M = scenario.num_ris_elements();
    if (N > 16 || std::pow(grid_points, M) > 1e6)
        throw std::invalid_argument("instance too large for exhaustive search");
    long grid_size = 1;
    for (int m = 0; m < M; ++m)
        grid_size *= grid_points;

    SlotOptimum best;
    best.objective = -1.0;
    std::vector<double> theta(static_cast<std::size_t>(M));
    for (long g = 0; g < grid_size; ++g)
    {
        long rest = g;
        for (int m = 0; m < M; ++m)
        {
            theta[m] = 2.0 * std::numbers::pi * static_cast<double>(rest % grid_points) / grid_points;
            rest /= grid_points;
        }
        for (unsigned mask = 1; mask < (1u << N); ++mask)
        {
            const std::vector<int> y = subset_bits(mask, N);
            const double f = subset_objective(scenario, coverage, y, theta);
            if (f > best.objective)
            {
                best.objective = f;
                best.beams = y;
                best.theta = theta;
            }
        }
    }
    return best;
}

double best_selection(const CellScenario &scenario, std::span<const double> theta, const CoverageState &coverage)
{
    // For a fixed beam set the best r claims exactly the uncovered zones that clear tau,
    // so enumerating y alone covers every (y, r) pair.
    const int N = scenario.num_beams();
    if (N > 16)
        throw std::invalid_argument("instance too large for exhaustive search");
    double best = 0.0;
    for (unsigned mask = 1; mask < (1u << N); ++mask)
        best = std::max(best, subset_objective(scenario, coverage, subset_bits(mask, N), theta));
    return best;
}

CellScenario micro_instance(std::uint64_t seed, int num_beams, int num_zones, int num_ris_elements)
{
    CounterRng rng(seed, 0x6d6963726fULL);
    ScenarioParams p;
    p.num_beams = num_beams;
    p.num_bs_antennas = num_beams;
    p.num_zones = num_zones;
    p.num_ris_elements = num_ris_elements;
    p.cell_radius = 200.0 + 800.0 * rng.uniform();
    const CellScenario base = build_scenario(p, seed);
    const Eigen::MatrixXd gains = beam_gains(base, {});
    const double lo = gains.rowwise().maxCoeff().minCoeff() / p.noise_power;
    const double hi = gains.maxCoeff() / p.noise_power;
    p.snr_threshold = lo * std::pow(hi / lo, rng.uniform());
    return build_scenario(p, seed);
}

double best_single_phase_snr(const CellScenario &scenario, int zone, std::span<const int> beams, int grid_points)
{
    if (scenario.num_ris_elements() != 1)
        throw std::invalid_argument("expects a single RIS element");
    double best = 0.0;
    for (int k = 0; k < grid_points; ++k)
    {
        const double theta = 2.0 * std::numbers::pi * k / grid_points;
        best = std::max(best, direct_snr(scenario, zone, beams, std::span<const double>(&theta, 1)));
    }
    return best;
}

} // namespace risia::oracle
