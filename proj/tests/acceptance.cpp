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

// Acceptance suite. Prints one PASS/FAIL line per criterion (details indented below it)
// and exits non-zero if any criterion fails. Pass criterion numbers as arguments to run
// a subset; 2, 7 and 8 share the desk experiment.

#include "oracles/brute_force.hpp"
#include "risia/experiment.hpp"
#include "risia/rng.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using namespace risia;
namespace fs = std::filesystem;

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome
{
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;
};

std::string fixed(double v, int digits)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string sci(double v)
{
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig desk_config()
{
    return validate_config(fs::path(RISIA_CONFIG_DIR) / "desk.toml");
}

int worker_count()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------- 1

Outcome baseline_sweep()
{
    Outcome out;
    int scenarios = 0;
    for (int n : {8, 16, 64})
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            ScenarioParams p;
            p.num_beams = n;
            p.num_bs_antennas = n;
            p.num_zones = 40;
            p.snr_threshold = std::pow(10.0, (10.0 + 2.5 * static_cast<double>(seed)) / 10.0);
            const RunResult run = run_beam_sweep(build_scenario(p, seed));
            ++scenarios;
            if (run.total_slots != n || static_cast<int>(run.slots.size()) != n)
            {
                out.pass = false;
                out.details.push_back("N=" + std::to_string(n) + " seed " + std::to_string(seed) + ": " +
                                      std::to_string(run.total_slots) + " slots");
            }
        }
    }
    out.summary = "beam sweep uses exactly N slots, N in {8, 16, 64}, " + std::to_string(scenarios) + " scenarios";
    return out;
}

// ---------------------------------------------------------------- 2, 7, 8

struct DeskRun
{
    ExperimentConfig cfg;
    ExperimentReport report;
    double seconds = 0.0;
    fs::path dir;
};

DeskRun run_desk(const fs::path &dir, int jobs)
{
    DeskRun d;
    d.cfg = desk_config();
    d.dir = dir;
    fs::remove_all(dir);
    ExperimentOptions opts;
    opts.output_dir = dir;
    opts.jobs = jobs;
    const auto t0 = clock_type::now();
    d.report = run_experiment(d.cfg, opts);
    d.seconds = seconds_since(t0);
    return d;
}

Outcome superiority(const DeskRun &desk)
{
    Outcome out;
    if (!desk.report.complete)
    {
        out.pass = false;
        out.summary = "desk experiment incomplete: " + desk.report.error;
        return out;
    }
    // Means from the written CSV, the same numbers the plot shows
    std::ifstream csv(desk.dir / "aggregate.csv");
    const std::vector<AggregateRow> rows = read_aggregate_csv(csv);
    std::map<double, std::map<Variant, std::pair<double, int>>> acc;
    for (const auto &r : rows)
    {
        auto &cell = acc[r.key.tau_db][r.key.variant];
        cell.first += r.total_slots;
        cell.second += 1;
    }
    const int beams = desk.cfg.scenario.num_beams;
    int violations = 0;
    for (const auto &[tau, by_variant] : acc)
    {
        auto mean = [&](Variant v)
        {
            const auto it = by_variant.find(v);
            return it == by_variant.end() ? std::nan("") : it->second.first / it->second.second;
        };
        const double p3 = mean(Variant::p3);
        const double p4 = mean(Variant::p4);
        const double sw = mean(Variant::sweep);
        std::string flags;
        if (!(p3 < beams))
            flags += " P3>=N";
        if (!(p4 < beams))
            flags += " P4>=N";
        if (!(p4 <= p3))
            flags += " P4>P3";
        if (!flags.empty())
            ++violations;
        out.details.push_back("tau " + fixed(tau, 0) + " dB: mean slots P3 " + fixed(p3, 1) + ", P4 " + fixed(p4, 1) +
                              ", sweep " + fixed(sw, 1) + (flags.empty() ? "" : "  <-" + flags));
    }
    const bool in_time = desk.seconds <= 600.0;
    out.pass = violations == 0 && in_time && acc.size() == desk.cfg.thresholds_db.size();
    out.summary = "desk scale: mean slots of P3 and P4 below N and P4 <= P3 at every threshold (" +
                  std::to_string(violations) + " thresholds violate), " + fixed(desk.seconds, 0) + " s of 600 s";
    return out;
}

Outcome feasibility_soundness(const DeskRun &desk)
{
    Outcome out;
    long zones_checked = 0;
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &rec : desk.report.records)
    {
        const CellScenario sc = scenario_for(desk.cfg, rec.row.key);
        const double tau = sc.snr_threshold();
        for (const auto &slot : rec.result.slots)
            for (int q : slot.newly_covered)
            {
                const double slack = oracle::direct_snr(sc, q, slot.selection.y, slot.phases.theta) - tau;
                worst = std::min(worst, slack / tau);
                ++zones_checked;
                if (slack < -1e-8 * tau)
                {
                    ++violations;
                    out.details.push_back(run_name(rec.row.key) + " zone " + std::to_string(q) + ": relative slack " +
                                          sci(slack / tau));
                }
            }
    }
    out.pass = violations == 0 && desk.report.complete && zones_checked > 0;
    out.summary = "every activated zone meets the threshold (slack >= -1e-8 tau): " + std::to_string(zones_checked) +
                  " activations, " + std::to_string(violations) + " violations, worst relative slack " + sci(worst);
    return out;
}

Outcome determinism(const DeskRun &first)
{
    Outcome out;
    const DeskRun second = run_desk(fs::temp_directory_path() / "risia_acceptance_desk_b", std::max(2, worker_count()));
    const std::string a = read_file(first.dir / "aggregate.csv");
    const std::string b = read_file(second.dir / "aggregate.csv");
    out.pass = first.report.complete && second.report.complete && !a.empty() && a == b;
    out.summary = "two desk runs with the same config give bit-identical aggregate CSVs (" + std::to_string(a.size()) +
                  " bytes, second run on " + std::to_string(std::max(2, worker_count())) + " threads)";
    if (a != b)
        out.details.push_back("aggregate CSVs differ");
    return out;
}

// ---------------------------------------------------------------- 3

Outcome monotone_traces()
{
    Outcome out;
    const int calls = 200;
    int bad = 0;
    long total_iterations = 0;
    const auto t0 = clock_type::now();
    for (int i = 0; i < calls; ++i)
    {
        CounterRng rng(static_cast<std::uint64_t>(i), 0x616c74ULL);
        ScenarioParams p;
        p.num_zones = 10;
        p.num_bs_antennas = 16;
        p.num_beams = 16;
        p.num_ris_elements = 16;
        p.snr_threshold = std::pow(10.0, (10.0 + 10.0 * rng.uniform()) / 10.0);
        const CellScenario sc = build_scenario(p, static_cast<std::uint64_t>(i) + 1);
        const ZTable z(sc);

        CoverageState cov(10);
        for (auto &c : cov.covered)
            c = rng.uniform() < 0.3 ? 1 : 0;
        if (cov.all_covered())
            cov.covered[0] = 0;
        std::vector<double> theta(16, 0.0);
        if (i % 2 == 1)
            for (auto &t : theta)
                t = 2.0 * std::numbers::pi * rng.uniform();

        ProtocolConfig cfg;
        cfg.rounding.rng_seed = static_cast<std::uint64_t>(i) + 1;
        const Variant v = i % 4 < 2 ? Variant::p3 : Variant::p4;
        const AlternationResult res = alternate(sc, z, cov, PhaseConfig(theta), v, cfg, static_cast<std::uint64_t>(i));
        total_iterations += res.iterations;
        bool ok = true;
        for (std::size_t k = 1; k < res.trace.size(); ++k)
            ok = ok && res.trace[k] >= res.trace[k - 1];
        if (!res.trace.empty())
            ok = ok && res.trace.back() == res.objective;
        if (!ok)
        {
            ++bad;
            out.details.push_back("call " + std::to_string(i) + ": trace decreases");
        }
    }
    out.pass = bad == 0;
    out.summary = "accepted objective never decreases within an alternation: " + std::to_string(calls - bad) + "/" +
                  std::to_string(calls) + " calls monotone, " + std::to_string(total_iterations) + " iterations, " +
                  fixed(seconds_since(t0), 0) + " s";
    return out;
}

// ---------------------------------------------------------------- 4

Outcome oracle_bound()
{
    Outcome out;
    const int instances = 50;
    const auto t0 = clock_type::now();
    std::map<Variant, int> good;
    int exceed = 0;
    int slots_checked = 0;
    for (int i = 1; i <= instances; ++i)
    {
        const CellScenario sc = oracle::micro_instance(static_cast<std::uint64_t>(i));
        for (Variant v : {Variant::p3, Variant::p4})
        {
            ProtocolConfig cfg;
            cfg.rounding.rng_seed = static_cast<std::uint64_t>(i);
            const RunResult run = run_initial_access(sc, v, cfg);
            CoverageState cov(sc.num_zones());
            bool attains = true;
            for (const auto &slot : run.slots)
            {
                const double best = oracle::best_slot(sc, cov, 8).objective;
                ++slots_checked;
                if (slot.objective > best + 1e-9)
                {
                    ++exceed;
                    out.details.push_back("instance " + std::to_string(i) + " " + to_string(v) + " slot " +
                                          std::to_string(slot.index) + ": " + fixed(slot.objective, 3) + " > " +
                                          fixed(best, 3));
                }
                if (slot.objective < 0.8 * best)
                    attains = false;
                for (int q : slot.newly_covered)
                    cov.covered[q] = 1;
            }
            if (run.slots.empty())
                attains = oracle::best_slot(sc, CoverageState(sc.num_zones()), 8).objective == 0.0;
            if (attains)
                ++good[v];
        }
    }
    const double secs = seconds_since(t0);
    const int need = (4 * instances + 4) / 5;
    out.pass = exceed == 0 && good[Variant::p3] >= need && good[Variant::p4] >= need && secs <= 300.0;
    out.summary = "micro instances (N=4, Q=3, M=2, 8-point phase grid): " + std::to_string(exceed) +
                  " slots above the exhaustive optimum out of " + std::to_string(slots_checked) + "; every slot within 80% in " +
                  std::to_string(good[Variant::p3]) + "/" + std::to_string(instances) + " (P3) and " +
                  std::to_string(good[Variant::p4]) + "/" + std::to_string(instances) + " (P4) instances, " +
                  fixed(secs, 0) + " s";
    return out;
}

// ---------------------------------------------------------------- 5

sdp::Sense parse_sense(const std::string &s)
{
    if (s == "eq")
        return sdp::Sense::equal;
    return s == "ge" ? sdp::Sense::greater_equal : sdp::Sense::less_equal;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json &j)
{
    Eigen::MatrixXd m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::size_t k = 0; k < j[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    return m;
}

Outcome sdp_correctness()
{
    Outcome out;
    struct Case
    {
        std::string name;
        sdp::SdpProblem problem;
        double expected;
    };
    std::vector<Case> cases;
    {
        sdp::SdpProblem p;
        p.dim = 1;
        p.objective = Eigen::MatrixXd::Ones(1, 1);
        p.constraints.push_back({Eigen::MatrixXd::Ones(1, 1), sdp::Sense::less_equal, 3.0, {}});
        cases.push_back({"scalar", p, 3.0});
    }
    {
        CounterRng rng(12, 0);
        const int n = 6;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                a(i, k) = rng.normal();
        const Eigen::MatrixXd c = 0.5 * (a + a.transpose());
        sdp::SdpProblem p;
        p.dim = n;
        p.objective = c;
        p.constraints.push_back({Eigen::MatrixXd::Identity(n, n), sdp::Sense::equal, 1.0, {}});
        cases.push_back({"largest eigenvalue", p, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues().maxCoeff()});
    }
    std::ifstream in(RISIA_TEST_DATA_DIR "/sdp_reference.json");
    const nlohmann::json data = nlohmann::json::parse(in);
    int index = 0;
    for (const auto &pj : data["problems"])
    {
        sdp::SdpProblem p;
        p.dim = pj["dim"].get<int>();
        p.objective = matrix_from_json(pj["objective"]);
        p.num_scalars = pj["num_scalars"].get<int>();
        p.scalar_objective = Eigen::VectorXd::Zero(p.num_scalars);
        for (int i = 0; i < p.num_scalars; ++i)
            p.scalar_objective(i) = pj["scalar_objective"][i].get<double>();
        for (const auto &cj : pj["constraints"])
        {
            sdp::Constraint c{matrix_from_json(cj["a"]), parse_sense(cj["sense"].get<std::string>()),
                              cj["bound"].get<double>(), {}};
            if (cj.contains("scalar_coeffs") && !cj["scalar_coeffs"].empty())
            {
                c.scalar_coeffs.resize(static_cast<Eigen::Index>(cj["scalar_coeffs"].size()));
                for (std::size_t i = 0; i < cj["scalar_coeffs"].size(); ++i)
                    c.scalar_coeffs(static_cast<Eigen::Index>(i)) = cj["scalar_coeffs"][i].get<double>();
            }
            p.constraints.push_back(std::move(c));
        }
        for (const auto &f : pj["fixed_entries"])
            p.fixed_entries.push_back({f["row"].get<int>(), f["col"].get<int>(), f["value"].get<double>()});
        cases.push_back({"reference " + std::to_string(index++), p, pj["optimal_value"].get<double>()});
    }

    double worst_err = 0.0;
    double worst_kkt = 0.0;
    for (const auto &c : cases)
    {
        const sdp::SdpSolution sol = sdp::solve(c.problem);
        const double err = std::abs(sol.objective_value - c.expected);
        const double kkt = std::max({sol.residuals.primal, sol.residuals.dual, sol.residuals.gap});
        worst_err = std::max(worst_err, err);
        worst_kkt = std::max(worst_kkt, kkt);
        if (sol.status != sdp::SolveStatus::optimal || err > 1e-5 || kkt > 1e-6)
        {
            out.pass = false;
            out.details.push_back(c.name + ": status " + sdp::to_string(sol.status) + ", error " + sci(err) +
                                  ", residual " + sci(kkt));
        }
    }
    out.summary = "SDP solver on " + std::to_string(cases.size()) + " problems: worst objective error " + sci(worst_err) +
                  " (<= 1e-5), worst KKT residual " + sci(worst_kkt) + " (<= 1e-6)";
    return out;
}

// ---------------------------------------------------------------- 6

Outcome quadratic_identity()
{
    Outcome out;
    const int draws = 1000;
    double worst = 0.0;
    std::map<std::uint64_t, CellScenario> cache;
    for (int i = 0; i < draws; ++i)
    {
        CounterRng rng(static_cast<std::uint64_t>(i), 0x7a6964ULL);
        const std::uint64_t sid = static_cast<std::uint64_t>(i % 20);
        if (!cache.count(sid))
        {
            CounterRng srng(sid, 1);
            ScenarioParams p;
            p.num_zones = 10;
            p.num_bs_antennas = 4 + static_cast<int>(srng.uniform() * 28);
            p.num_beams = 4 + static_cast<int>(srng.uniform() * 28);
            p.num_ris_elements = 1 + static_cast<int>(srng.uniform() * 32);
            p.cell_radius = 100.0 + 900.0 * srng.uniform();
            cache.emplace(sid, build_scenario(p, sid + 1));
        }
        const CellScenario &sc = cache.at(sid);
        const int q = static_cast<int>(rng.uniform() * sc.num_zones());
        const int n = static_cast<int>(rng.uniform() * sc.num_beams());
        std::vector<double> theta(static_cast<std::size_t>(sc.num_ris_elements()));
        for (auto &t : theta)
            t = 2.0 * std::numbers::pi * rng.uniform();

        const Eigen::MatrixXcd z = build_z(sc, q, n);
        const Eigen::VectorXcd t_bar = PhaseConfig(theta).t_bar();
        const double lhs = (t_bar.adjoint() * z * t_bar).value().real();
        std::vector<int> one(static_cast<std::size_t>(sc.num_beams()), 0);
        one[static_cast<std::size_t>(n)] = 1;
        const double rhs = oracle::direct_snr(sc, q, one, theta) * sc.noise_power();
        const double rel = std::abs(lhs - rhs) / rhs;
        worst = std::max(worst, rel);
        if (!(rel <= 1e-10))
        {
            out.pass = false;
            out.details.push_back("draw " + std::to_string(i) + ": relative error " + sci(rel));
        }
    }
    out.summary = "t_bar^H Z t_bar equals the direct received power on " + std::to_string(draws) +
                  " draws, worst relative error " + sci(worst) + " (<= 1e-10)";
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int k) { return selected.empty() || selected.count(k) > 0; };

    int failures = 0;
    auto report = [&](int k, const Outcome &o)
    {
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k << ". " << o.summary << "\n";
        for (const auto &d : o.details)
            std::cout << "         " << d << "\n";
        std::cout.flush();
        if (!o.pass)
            ++failures;
    };
    auto guarded = [&](int k, auto &&fn)
    {
        try
        {
            report(k, fn());
        }
        catch (const std::exception &e)
        {
            report(k, Outcome{false, std::string("threw: ") + e.what(), {}});
        }
    };

    if (wanted(1))
        guarded(1, baseline_sweep);
    if (wanted(5))
        guarded(5, sdp_correctness);
    if (wanted(6))
        guarded(6, quadratic_identity);
    if (wanted(4))
        guarded(4, oracle_bound);
    if (wanted(3))
        guarded(3, monotone_traces);
    if (wanted(2) || wanted(7) || wanted(8))
    {
        std::optional<DeskRun> desk;
        try
        {
            desk = run_desk(fs::temp_directory_path() / "risia_acceptance_desk_a", worker_count());
        }
        catch (const std::exception &e)
        {
            for (int k : {2, 7, 8})
                if (wanted(k))
                    report(k, Outcome{false, std::string("desk experiment threw: ") + e.what(), {}});
        }
        if (desk)
        {
            if (wanted(2))
                guarded(2, [&] { return superiority(*desk); });
            if (wanted(7))
                guarded(7, [&] { return feasibility_soundness(*desk); });
            if (wanted(8))
                guarded(8, [&] { return determinism(*desk); });
        }
    }

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
