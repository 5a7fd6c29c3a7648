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

#include "risia/experiment.hpp"
#include "risia/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace risia
{

namespace
{

// Shortest decimal form that reads back to the same double.
std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int digits)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

std::ofstream open_for_write(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out = open_for_write(path);
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

AggregateRow summarize(const RunKey &key, const RunResult &r)
{
    AggregateRow row;
    row.key = key;
    row.total_slots = r.total_slots;
    row.covered = static_cast<int>(r.covered_zones.size());
    row.unreachable = static_cast<int>(r.unreachable_zones.size());
    row.alternations = r.alternations;
    row.sdp_iterations = r.sdp_iterations;
    return row;
}

} // namespace

std::vector<RunKey> experiment_grid(const ExperimentConfig &cfg)
{
    std::vector<RunKey> keys;
    for (Variant v : cfg.variants)
        for (double tau : cfg.thresholds_db)
            for (std::uint64_t seed : cfg.seeds)
                keys.push_back({v, tau, seed});
    return keys;
}

CellScenario scenario_for(const ExperimentConfig &cfg, const RunKey &key)
{
    ScenarioParams p = cfg.scenario;
    p.snr_threshold = db_to_linear(key.tau_db);
    return build_scenario(p, cfg.randomize_ris ? key.seed : 0);
}

ProtocolConfig protocol_for(const ExperimentConfig &cfg, const RunKey &key)
{
    // Every variant sees the same random streams for a given seed.
    ProtocolConfig p = cfg.protocol;
    p.rounding.rng_seed = CounterRng::mix(cfg.protocol.rounding.rng_seed ^ CounterRng::mix(key.seed));
    return p;
}

RunRecord run_single(const ExperimentConfig &cfg, const RunKey &key)
{
    const auto start = std::chrono::steady_clock::now();
    const CellScenario scenario = scenario_for(cfg, key);
    RunRecord rec;
    rec.result = key.variant == Variant::sweep ? run_beam_sweep(scenario)
                                               : run_initial_access(scenario, key.variant, protocol_for(cfg, key));
    rec.row = summarize(key, rec.result);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::string run_name(const RunKey &key)
{
    return to_string(key.variant) + "_tau" + fmt(key.tau_db) + "_seed" + std::to_string(key.seed);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig &cfg, const std::filesystem::path &cli_override)
{
    if (!cli_override.empty())
        return cli_override;
    if (const char *env = std::getenv(output_dir_env); env && *env)
        return env;
    return cfg.output_dir;
}

void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out)
{
    out << aggregate_csv_header << "\n";
    out << "variant,tau_db,seed,total_slots,covered,unreachable,alternations,sdp_iterations\n";
    for (const auto &r : rows)
    {
        out << to_string(r.key.variant) << "," << fmt(r.key.tau_db) << "," << r.key.seed << "," << r.total_slots << ","
            << r.covered << "," << r.unreachable << "," << r.alternations << "," << r.sdp_iterations << "\n";
    }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream &in)
{
    std::vector<AggregateRow> rows;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header)
        {
            if (line.rfind("variant,", 0) != 0)
                throw std::runtime_error("aggregate CSV line " + std::to_string(line_no) + ": missing column header");
            saw_header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 8)
            throw std::runtime_error("aggregate CSV line " + std::to_string(line_no) + ": expected 8 fields");
        try
        {
            AggregateRow r;
            r.key.variant = variant_from_string(f[0]);
            r.key.tau_db = std::stod(f[1]);
            r.key.seed = std::stoull(f[2]);
            r.total_slots = std::stoi(f[3]);
            r.covered = std::stoi(f[4]);
            r.unreachable = std::stoi(f[5]);
            r.alternations = std::stoi(f[6]);
            r.sdp_iterations = std::stol(f[7]);
            rows.push_back(r);
        }
        catch (const std::exception &e)
        {
            throw std::runtime_error("aggregate CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

std::string render_slots_svg(const std::vector<AggregateRow> &rows)
{
    // Mean total_slots per (variant, tau) in first-appearance order of the variants.
    std::vector<Variant> order;
    std::map<int, std::map<double, std::pair<double, int>>> acc;
    for (const auto &r : rows)
    {
        const int v = static_cast<int>(r.key.variant);
        if (std::find(order.begin(), order.end(), r.key.variant) == order.end())
            order.push_back(r.key.variant);
        auto &cell = acc[v][r.key.tau_db];
        cell.first += r.total_slots;
        cell.second += 1;
    }

    double tmin = 0.0, tmax = 1.0, ymax = 1.0;
    bool first = true;
    for (const auto &[v, series] : acc)
        for (const auto &[tau, cell] : series)
        {
            const double mean = cell.first / cell.second;
            if (first)
            {
                tmin = tmax = tau;
                first = false;
            }
            tmin = std::min(tmin, tau);
            tmax = std::max(tmax, tau);
            ymax = std::max(ymax, mean);
        }
    if (tmax == tmin)
        tmax = tmin + 1.0;
    ymax = std::ceil(ymax * 1.1);

    const double W = 640, H = 420, left = 60, right = 150, top = 30, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double tau) { return left + (tau - tmin) / (tmax - tmin) * pw; };
    auto py = [&](double y) { return top + ph - y / ymax * ph; };
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double y = ymax * i / 4.0;
        svg << "<text x=\"" << left - 8 << "\" y=\"" << fmt_fixed(py(y) + 4, 1) << "\" text-anchor=\"end\">"
            << fmt_fixed(y, 1) << "</text>\n";
    }
    std::vector<double> taus;
    for (const auto &[v, series] : acc)
        for (const auto &[tau, cell] : series)
            if (std::find(taus.begin(), taus.end(), tau) == taus.end())
                taus.push_back(tau);
    std::sort(taus.begin(), taus.end());
    for (double tau : taus)
        svg << "<text x=\"" << fmt_fixed(px(tau), 1) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
            << fmt(tau) << "</text>\n";
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">SNR threshold (dB)</text>\n";
    svg << "<text x=\"15\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << top + ph / 2 << ")\">mean timeslots</text>\n";

    for (std::size_t i = 0; i < order.size(); ++i)
    {
        const char *color = colors[i % 4];
        const auto &series = acc[static_cast<int>(order[i])];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool sep = false;
        for (const auto &[tau, cell] : series)
        {
            svg << (sep ? " " : "") << fmt_fixed(px(tau), 1) << "," << fmt_fixed(py(cell.first / cell.second), 1);
            sep = true;
        }
        svg << "\"/>\n";
        for (const auto &[tau, cell] : series)
            svg << "<circle cx=\"" << fmt_fixed(px(tau), 1) << "\" cy=\"" << fmt_fixed(py(cell.first / cell.second), 1)
                << "\" r=\"3\" fill=\"" << color << "\"><title>" << fmt(cell.first / cell.second) << "</title></circle>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(i);
        svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + pw + 45 << "\" y=\"" << ly + 4 << "\">" << to_string(order[i]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

ExperimentReport run_experiment(const ExperimentConfig &cfg, const ExperimentOptions &options)
{
    cfg.validate();
    if (options.jobs < 1)
        throw std::invalid_argument("jobs must be at least 1");

    ExperimentReport report;
    report.output_dir = resolve_output_dir(cfg, options.output_dir);
    const std::filesystem::path runs_dir = report.output_dir / "runs";
    if (options.write_files)
    {
        std::filesystem::create_directories(runs_dir);
        // Fail early on an unwritable directory, before any work is done.
        write_text(report.output_dir / "manifest.json", "{\"complete\": false}\n");
    }

    const std::vector<RunKey> keys = experiment_grid(cfg);
    std::vector<std::optional<RunRecord>> slots(keys.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::size_t error_index = keys.size();

    auto worker = [&]()
    {
        for (;;)
        {
            if (failed.load())
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= keys.size())
                return;
            try
            {
                RunRecord rec = run_single(cfg, keys[i]);
                if (options.write_files)
                {
                    const std::string name = run_name(keys[i]);
                    nlohmann::json j = to_json(rec.result);
                    j["tau_db"] = keys[i].tau_db;
                    j["seed"] = keys[i].seed;
                    write_text(runs_dir / (name + ".json"), j.dump(2) + "\n");
                    std::ofstream csv = open_for_write(runs_dir / (name + "_slots.csv"));
                    write_slots_csv(rec.result, scenario_for(cfg, keys[i]), csv);
                }
                slots[i] = std::move(rec);
            }
            catch (const std::exception &e)
            {
                std::lock_guard lock(error_mutex);
                if (i < error_index)
                {
                    error_index = i;
                    report.error = run_name(keys[i]) + ": " + e.what();
                }
                failed.store(true);
            }
        }
    };

    const int threads = std::min<int>(options.jobs, static_cast<int>(std::max<std::size_t>(keys.size(), 1)));
    if (threads <= 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }

    for (auto &s : slots)
        if (s)
            report.records.push_back(std::move(*s));
    report.complete = !failed.load() && report.records.size() == keys.size();

    if (options.write_files)
    {
        std::vector<AggregateRow> rows;
        for (const auto &r : report.records)
            rows.push_back(r.row);
        {
            std::ofstream out = open_for_write(report.output_dir / "aggregate.csv");
            write_aggregate_csv(rows, out);
        }
        {
            std::ofstream out = open_for_write(report.output_dir / "timings.csv");
            out << "variant,tau_db,seed,wall_seconds\n";
            for (const auto &r : report.records)
                out << to_string(r.row.key.variant) << "," << fmt(r.row.key.tau_db) << "," << r.row.key.seed << ","
                    << fmt(r.wall_seconds) << "\n";
        }
        write_text(report.output_dir / "slots_vs_threshold.svg", render_slots_svg(rows));

        nlohmann::json manifest;
        manifest["complete"] = report.complete;
        manifest["runs_expected"] = keys.size();
        manifest["runs_completed"] = report.records.size();
        if (!report.complete)
            manifest["error"] = report.error;
        nlohmann::json variants = nlohmann::json::array();
        for (Variant v : cfg.variants)
            variants.push_back(to_string(v));
        manifest["variants"] = variants;
        manifest["snr_threshold_db"] = cfg.thresholds_db;
        manifest["seeds"] = cfg.seeds;
        manifest["files"] = {"aggregate.csv", "timings.csv", "slots_vs_threshold.svg", "runs/"};
        write_text(report.output_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return report;
}

} // namespace risia
