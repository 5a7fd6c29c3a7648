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

#include "risia/protocol.hpp"
#include "risia/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace risia
{

namespace
{

std::uint64_t sub_key(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0)
{
    return CounterRng::mix(CounterRng::mix(base ^ (a << 20)) ^ b);
}

PhaseConfig random_phases(int num_elements, std::uint64_t seed, std::uint64_t key)
{
    CounterRng rng(seed, key);
    std::vector<double> theta(static_cast<std::size_t>(num_elements));
    for (double &a : theta)
        a = 2.0 * std::numbers::pi * rng.uniform();
    return PhaseConfig(std::move(theta));
}

std::vector<double> all_zone_snrs(const CellScenario &scenario, const SelectionVector &s, const PhaseConfig &phases)
{
    std::vector<double> out(static_cast<std::size_t>(scenario.num_zones()), 0.0);
    if (s.num_active_beams() == 0)
        return out;
    const Eigen::MatrixXd gains = beam_gains(scenario, phases.theta);
    for (int q = 0; q < scenario.num_zones(); ++q)
        out[q] = snr_from_gains(gains, q, s.y, scenario.noise_power());
    return out;
}

} // namespace

std::string to_string(Variant v)
{
    switch (v)
    {
    case Variant::p3:
        return "P3";
    case Variant::p4:
        return "P4";
    case Variant::sweep:
        return "sweep";
    }
    return "unknown";
}

Variant variant_from_string(const std::string &name)
{
    if (name == "P3" || name == "p3")
        return Variant::p3;
    if (name == "P4" || name == "p4")
        return Variant::p4;
    if (name == "sweep")
        return Variant::sweep;
    throw std::invalid_argument("Unknown variant '" + name + "' (expected P3, P4 or sweep).");
}

FeasibilityReport check_feasible(const SelectionVector &selection, const PhaseConfig &phases,
                                 const CellScenario &scenario, double tol)
{
    const int Q = scenario.num_zones();
    FeasibilityReport rep;
    rep.slack.assign(static_cast<std::size_t>(Q), 0.0);
    if (selection.num_claimed_zones() == 0)
        return rep;
    if (selection.num_active_beams() == 0)
    {
        rep.feasible = false;
        for (int q = 0; q < Q; ++q)
            if (selection.r[q] != 0)
                rep.slack[q] = -scenario.snr_threshold();
        return rep;
    }
    const double tau = scenario.snr_threshold();
    for (int q = 0; q < Q; ++q)
    {
        if (selection.r[q] == 0)
            continue;
        const double value = snr(scenario, q, selection.y, phases.theta);
        rep.slack[q] = value - tau;
        if (value < tau * (1.0 - tol))
            rep.feasible = false;
    }
    return rep;
}

AlternationResult alternate(const CellScenario &scenario, const ZTable &z, const CoverageState &coverage,
                            const PhaseConfig &initial_phases, Variant variant, const ProtocolConfig &cfg,
                            std::uint64_t stream_key)
{
    if (variant == Variant::sweep)
        throw std::invalid_argument("Alternating optimization needs the P3 or P4 variant.");
    const int M = scenario.num_ris_elements();
    if (static_cast<int>(initial_phases.theta.size()) != M)
        throw std::invalid_argument("Initial phases must have one entry per RIS element.");

    AlternationResult res;
    res.selection = SelectionVector(scenario.num_beams(), scenario.num_zones());
    res.phases = initial_phases;
    if (coverage.all_covered())
        return res;

    const double reachable = coverage.uncovered_weight(scenario);
    const double tol = cfg.rounding.feasibility_tol;
    PhaseConfig theta = initial_phases;
    int stable = 0;

    for (int it = 0; it < cfg.stop.max_iters; ++it)
    {
        ++res.iterations;

        // Beams and zones for fixed phases
        const sdp::SdpProblem p2 = build_p2(scenario, theta.theta, coverage, cfg.p2);
        const sdp::SdpSolution s2 = sdp::solve(p2, cfg.solver);
        res.sdp_iterations += s2.iterations;
        P2Rounding r2;
        if (s2.status != sdp::SolveStatus::infeasible)
            r2 = round_p2(s2.x, scenario, theta.theta, coverage, cfg.rounding, sub_key(stream_key, it, 1));

        // Phases for fixed beams and zones
        PhaseConfig next = theta;
        if (r2.feasible && M > 0)
        {
            const PhaseContext ctx{scenario, z, r2.selection, coverage};
            const bool p4 = variant == Variant::p4;
            const sdp::SdpProblem pp = p4 ? build_p4(scenario, z, r2.selection, coverage)
                                          : build_p3(scenario, z, r2.selection);
            const sdp::SdpSolution sp = sdp::solve(pp, cfg.solver);
            res.sdp_iterations += sp.iterations;
            if (sp.status != sdp::SolveStatus::infeasible)
            {
                const PhaseRounding rp = round_phase(deembed_phase_matrix(sp.x), p4 ? PhaseProblem::p4 : PhaseProblem::p3,
                                                     ctx, cfg.rounding, sub_key(stream_key, it, 2));
                if (rp.feasible)
                    next = rp.phases;
            }
        }

        bool accepted = false;
        if (r2.feasible)
        {
            // The pair is re-checked against the channel model directly.
            const bool ok = check_feasible(r2.selection, next, scenario, tol).feasible;
            if (ok && (!res.found_feasible || r2.objective >= res.objective))
            {
                const bool improved = !res.found_feasible || r2.objective > res.objective;
                res.selection = r2.selection;
                res.phases = next;
                res.objective = r2.objective;
                res.found_feasible = true;
                accepted = true;
                stable = improved ? 0 : stable + 1;
            }
        }
        if (!accepted)
        {
            ++res.rejected_iterations;
            ++stable;
        }
        res.trace.push_back(res.objective);

        if (!res.found_feasible)
            break; // caller falls back
        if (res.objective >= reachable || stable >= cfg.stop.stable_iters)
            break;
        theta = res.phases;
    }
    return res;
}

RunResult run_initial_access(const CellScenario &scenario, Variant variant, const ProtocolConfig &cfg)
{
    if (variant == Variant::sweep)
        return run_beam_sweep(scenario);

    const int Q = scenario.num_zones();
    const int M = scenario.num_ris_elements();
    const ZTable z(scenario);

    RunResult run;
    run.variant = variant;
    run.rng_seed = cfg.rounding.rng_seed;
    run.snr_threshold = scenario.snr_threshold();

    CoverageState coverage(Q); // zones removed from the objective: covered or unreachable
    std::vector<int> covered(static_cast<std::size_t>(Q), 0);
    int round = 0;

    while (coverage.uncovered_weight(scenario) > 0.0)
    {
        const int slot = static_cast<int>(run.slots.size());
        AlternationResult best;
        for (int attempt = 0; attempt < 2; ++attempt)
        {
            const std::uint64_t key = sub_key(cfg.rounding.rng_seed, static_cast<std::uint64_t>(round), attempt);
            const PhaseConfig init = (attempt == 0 && !cfg.random_initial_phases)
                                         ? PhaseConfig::zeros(M)
                                         : random_phases(M, cfg.rounding.rng_seed, key);
            best = alternate(scenario, z, coverage, init, variant, cfg, key);
            ++run.alternations;
            run.sdp_iterations += best.sdp_iterations;
            if (best.found_feasible && best.objective > 0.0)
                break;
        }
        ++round;

        // Zones the slot's beams and phases lift above tau count as activated even when the
        // rounded selection did not claim them.
        std::vector<int> newly;
        std::vector<double> zone_snr;
        if (best.found_feasible)
        {
            zone_snr = all_zone_snrs(scenario, best.selection, best.phases);
            const double floor = scenario.snr_threshold() * (1.0 - cfg.rounding.feasibility_tol);
            for (int q = 0; q < Q; ++q)
            {
                if (coverage.covered[q] != 0)
                    continue;
                if (best.selection.r[q] == 0 && best.selection.num_active_beams() > 0 && zone_snr[q] >= floor)
                    best.selection.r[q] = 1;
                if (best.selection.r[q] != 0)
                    newly.push_back(q);
            }
        }

        if (newly.empty())
        {
            // Deadlock guard: give up on the heaviest remaining zone.
            int worst = -1;
            for (int q = 0; q < Q; ++q)
                if (coverage.covered[q] == 0 && (worst < 0 || scenario.zones[q].weight > scenario.zones[worst].weight))
                    worst = q;
            coverage.covered[worst] = 1;
            run.unreachable_zones.push_back(worst);
            run.guard_events.push_back({slot, worst});
            continue;
        }

        SlotResult sr;
        sr.index = slot;
        sr.selection = best.selection;
        sr.phases = best.phases;
        sr.newly_covered = newly;
        sr.objective = best.objective;
        sr.iterations = best.iterations;
        sr.trace = best.trace;
        sr.zone_snr = std::move(zone_snr);
        for (int q : newly)
        {
            coverage.covered[q] = 1;
            covered[q] = 1;
        }
        run.slots.push_back(std::move(sr));
    }

    for (int q = 0; q < Q; ++q)
        if (covered[q] != 0)
            run.covered_zones.push_back(q);
    std::sort(run.unreachable_zones.begin(), run.unreachable_zones.end());
    run.total_slots = static_cast<int>(run.slots.size());
    return run;
}

RunResult run_beam_sweep(const CellScenario &scenario)
{
    const int N = scenario.num_beams();
    const int Q = scenario.num_zones();
    const PhaseConfig phases = PhaseConfig::zeros(scenario.num_ris_elements());
    const Eigen::MatrixXd gains = beam_gains(scenario, phases.theta);
    const double tau = scenario.snr_threshold();

    RunResult run;
    run.variant = Variant::sweep;
    run.snr_threshold = tau;
    std::vector<int> covered(static_cast<std::size_t>(Q), 0);
    for (int n = 0; n < N; ++n)
    {
        SlotResult sr;
        sr.index = n;
        sr.selection = SelectionVector(N, Q);
        sr.selection.y[n] = 1;
        sr.phases = phases;
        sr.zone_snr.resize(static_cast<std::size_t>(Q));
        for (int q = 0; q < Q; ++q)
        {
            sr.zone_snr[q] = gains(q, n) / scenario.noise_power();
            if (sr.zone_snr[q] >= tau && covered[q] == 0)
            {
                covered[q] = 1;
                sr.selection.r[q] = 1;
                sr.newly_covered.push_back(q);
                sr.objective += scenario.zones[q].weight;
            }
        }
        sr.iterations = 0;
        run.slots.push_back(std::move(sr));
    }
    for (int q = 0; q < Q; ++q)
        (covered[q] != 0 ? run.covered_zones : run.unreachable_zones).push_back(q);
    run.total_slots = N;
    return run;
}

nlohmann::json to_json(const RunResult &run)
{
    nlohmann::json j;
    j["variant"] = to_string(run.variant);
    j["snr_threshold"] = run.snr_threshold;
    j["rng_seed"] = run.rng_seed;
    j["total_slots"] = run.total_slots;
    j["covered_zones"] = run.covered_zones;
    j["unreachable_zones"] = run.unreachable_zones;
    j["alternations"] = run.alternations;
    j["sdp_iterations"] = run.sdp_iterations;
    nlohmann::json guards = nlohmann::json::array();
    for (const auto &g : run.guard_events)
        guards.push_back({{"before_slot", g.before_slot}, {"unreachable_zone", g.zone}});
    j["guard_events"] = guards;
    nlohmann::json slots = nlohmann::json::array();
    for (const auto &s : run.slots)
    {
        slots.push_back({{"index", s.index},
                         {"beams", s.selection.y},
                         {"zones", s.selection.r},
                         {"phases", s.phases.theta},
                         {"newly_covered", s.newly_covered},
                         {"objective", s.objective},
                         {"iterations", s.iterations},
                         {"trace", s.trace},
                         {"zone_snr", s.zone_snr}});
    }
    j["slots"] = slots;
    return j;
}

void write_slots_csv(const RunResult &run, const CellScenario &scenario, std::ostream &out)
{
    out << "slot,newly_covered,cumulative_weight,objective\n";
    double cumulative = 0.0;
    for (const auto &s : run.slots)
    {
        for (int q : s.newly_covered)
            cumulative += scenario.zones[q].weight;
        out << s.index << "," << s.newly_covered.size() << "," << cumulative << "," << s.objective << "\n";
    }
}

} // namespace risia
