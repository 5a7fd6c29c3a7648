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

#include "risia/config.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace risia
{

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watts_to_dbm(double watts)
{
    return 10.0 * std::log10(watts) + 30.0;
}

config_error::config_error(const std::string &message, int line) : std::runtime_error(message), line_(line) {}

namespace
{

constexpr double speed_of_light = 299792458.0;
constexpr double deg = std::numbers::pi / 180.0;

int line_of(const toml::node &n)
{
    return static_cast<int>(n.source().begin.line);
}

// Typed access to one [section]; every read key is recorded so that leftovers can be
// reported as unknown.
class Section
{
  public:
    Section(const toml::table *table, std::string name) : table_(table), name_(std::move(name)) {}

    bool real(const char *key, double &out, const std::function<bool(double)> &ok, const char *requirement)
    {
        const toml::node *n = find(key);
        if (!n)
            return false;
        if (!n->is_number())
            fail(key, "must be a number", *n);
        const double v = n->is_integer() ? static_cast<double>(n->as_integer()->get()) : n->as_floating_point()->get();
        if (!std::isfinite(v) || !ok(v))
            fail(key, requirement, *n);
        out = v;
        return true;
    }

    void integer(const char *key, std::int64_t &out, std::int64_t min_value)
    {
        const toml::node *n = find(key);
        if (!n)
            return;
        if (!n->is_integer())
            fail(key, "must be an integer", *n);
        const std::int64_t v = n->as_integer()->get();
        if (v < min_value)
            fail(key, "must be at least " + std::to_string(min_value), *n);
        out = v;
    }

    void integer(const char *key, int &out, int min_value)
    {
        std::int64_t v = out;
        integer(key, v, static_cast<std::int64_t>(min_value));
        if (v > std::numeric_limits<int>::max())
            fail(key, "is too large", *find(key));
        out = static_cast<int>(v);
    }

    void boolean(const char *key, bool &out)
    {
        const toml::node *n = find(key);
        if (!n)
            return;
        if (!n->is_boolean())
            fail(key, "must be true or false", *n);
        out = n->as_boolean()->get();
    }

    void string(const char *key, std::string &out)
    {
        const toml::node *n = find(key);
        if (!n)
            return;
        if (!n->is_string())
            fail(key, "must be a string", *n);
        out = n->as_string()->get();
    }

    // Calls item() for each element; the callback receives the element node.
    bool array(const char *key, const std::function<void(const toml::node &)> &item)
    {
        const toml::node *n = find(key);
        if (!n)
            return false;
        if (!n->is_array())
            fail(key, "must be an array", *n);
        for (const toml::node &e : *n->as_array())
            item(e);
        return true;
    }

    [[noreturn]] void fail(const char *key, const std::string &what, const toml::node &n) const
    {
        throw config_error(name_ + "." + key + " " + what, line_of(n));
    }

    void finish() const
    {
        if (!table_)
            return;
        for (const auto &[k, v] : *table_)
            if (!known_.contains(std::string(k.str())))
                throw config_error("unknown key " + name_ + "." + std::string(k.str()), line_of(v));
    }

    int line(const char *key) const
    {
        const toml::node *n = table_ ? table_->get(key) : nullptr;
        return n ? line_of(*n) : 0;
    }

  private:
    const toml::node *find(const char *key)
    {
        known_.insert(key);
        return table_ ? table_->get(key) : nullptr;
    }

    const toml::table *table_;
    std::string name_;
    std::set<std::string> known_;
};

const toml::table *section_table(const toml::table &root, const char *name)
{
    const toml::node *n = root.get(name);
    if (!n)
        return nullptr;
    if (!n->is_table())
        throw config_error(std::string(name) + " must be a table", line_of(*n));
    return n->as_table();
}

auto positive = [](double v) { return v > 0.0; };
auto non_negative = [](double v) { return v >= 0.0; };
auto any_value = [](double) { return true; };

void read_scenario(Section &s, ScenarioParams &p)
{
    s.real("cell_radius_m", p.cell_radius, positive, "must be positive");
    s.integer("num_zones", p.num_zones, 1);
    s.integer("num_rings", p.num_rings, 0);
    s.integer("num_bs_antennas", p.num_bs_antennas, 1);
    s.integer("num_beams", p.num_beams, 1);
    s.integer("num_ris_elements", p.num_ris_elements, 0);
    s.integer("num_users", p.num_users, 1);

    double value = 0.0;
    if (s.real("transmit_power_dbm", value, any_value, "must be finite"))
        p.transmit_power = dbm_to_watts(value);
    if (s.real("noise_power_dbm", value, any_value, "must be finite"))
        p.noise_power = dbm_to_watts(value);
    if (s.real("ref_path_loss_db", value, any_value, "must be finite"))
        p.ref_path_loss = db_to_linear(value);

    s.real("ref_distance_m", p.ref_distance, positive, "must be positive");
    s.real("decay_exponent", p.decay_exponent, non_negative, "must be non-negative");

    if (s.real("carrier_frequency_hz", value, positive, "must be positive"))
        p.wavelength = speed_of_light / value;

    // Spacings default to half a wavelength (stored as 0).
    s.real("bs_spacing_m", p.bs_spacing, positive, "must be positive");
    s.real("ris_spacing_m", p.ris_spacing, positive, "must be positive");

    if (s.real("ris_azimuth_deg", value, any_value, "must be finite"))
        p.ris_azimuth = value * deg;
    if (s.real("sector_start_deg", value, any_value, "must be finite"))
        p.sector_start = value * deg;
    if (s.real("sector_extent_deg", value, [](double v) { return v > 0.0 && v <= 360.0; }, "must be in (0, 360]"))
        p.sector_extent = value * deg;
}

void read_experiment(Section &s, ExperimentConfig &cfg)
{
    const bool have_thresholds = s.array("snr_threshold_db", [&](const toml::node &e)
                {
                    if (!e.is_number())
                        s.fail("snr_threshold_db", "entries must be numbers", e);
                    const double v = e.is_integer() ? static_cast<double>(e.as_integer()->get())
                                                    : e.as_floating_point()->get();
                    if (!std::isfinite(v))
                        s.fail("snr_threshold_db", "entries must be finite", e);
                    if (!cfg.thresholds_db.empty() && v < cfg.thresholds_db.back())
                        s.fail("snr_threshold_db", "must be sorted in increasing order", e);
                    cfg.thresholds_db.push_back(v);
                });
    if (!have_thresholds)
        for (int t = 10; t <= 20; t += 2)
            cfg.thresholds_db.push_back(t);
    std::vector<Variant> variants;
    const bool have_variants = s.array("variants", [&](const toml::node &e)
                                       {
                                           if (!e.is_string())
                                               s.fail("variants", "entries must be strings", e);
                                           try
                                           {
                                               variants.push_back(variant_from_string(e.as_string()->get()));
                                           }
                                           catch (const std::invalid_argument &)
                                           {
                                               s.fail("variants", "entries must be P3, P4 or sweep, got '" +
                                                                      e.as_string()->get() + "'",
                                                      e);
                                           }
                                       });
    if (have_variants)
        cfg.variants = std::move(variants);
    const bool have_seeds = s.array("seeds", [&](const toml::node &e)
                                    {
                                        if (!e.is_integer() || e.as_integer()->get() < 0)
                                            s.fail("seeds", "entries must be non-negative integers", e);
                                        cfg.seeds.push_back(static_cast<std::uint64_t>(e.as_integer()->get()));
                                    });
    if (!have_seeds)
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
            cfg.seeds.push_back(seed);
    s.boolean("randomize_ris", cfg.randomize_ris);
    s.string("output_dir", cfg.output_dir);
}

void read_rounding(Section &s, RoundingConfig &r)
{
    s.integer("trials_p2", r.trials_p2, 1);
    s.integer("trials_phase", r.trials_phase, 1);
    std::int64_t seed = static_cast<std::int64_t>(r.rng_seed);
    s.integer("rng_seed", seed, 0);
    r.rng_seed = static_cast<std::uint64_t>(seed);
    s.real("feasibility_tol", r.feasibility_tol, non_negative, "must be non-negative");
    s.real("rank_one_tol", r.rank_one_tol, positive, "must be positive");
    std::string sampling = r.binary_sampling == BinarySampling::zero_mean ? "zero_mean" : "moment_matched";
    s.string("binary_sampling", sampling);
    if (sampling == "zero_mean")
        r.binary_sampling = BinarySampling::zero_mean;
    else if (sampling == "moment_matched")
        r.binary_sampling = BinarySampling::moment_matched;
    else
        throw config_error("rounding.binary_sampling must be \"zero_mean\" or \"moment_matched\"", s.line("binary_sampling"));
    s.boolean("complete_zones", r.complete_zones);
    s.boolean("threshold_sweep", r.threshold_sweep);
}

void read_solver(Section &s, sdp::SolverSettings &st)
{
    s.real("tol", st.tol, positive, "must be positive");
    s.integer("max_iters", st.max_iters, 1);
    s.integer("check_every", st.check_every, 1);
    s.integer("divergence_window", st.divergence_window, 1);
    s.real("rho", st.rho, positive, "must be positive");
    s.boolean("adaptive_rho", st.adaptive_rho);
}

void read_protocol(Section &s, ProtocolConfig &p)
{
    s.integer("max_iters", p.stop.max_iters, 1);
    s.integer("stable_iters", p.stop.stable_iters, 1);
    s.boolean("random_initial_phases", p.random_initial_phases);
    s.boolean("require_active_beam", p.p2.require_active_beam);
    s.boolean("lift_active_beam", p.p2.lift_active_beam);
}

} // namespace

void ExperimentConfig::validate() const
{
    if (thresholds_db.empty())
        throw config_error("experiment.snr_threshold_db must list at least one threshold", 0);
    for (double t : thresholds_db)
        if (!std::isfinite(t))
            throw config_error("experiment.snr_threshold_db entries must be finite", 0);
    if (!std::is_sorted(thresholds_db.begin(), thresholds_db.end()))
        throw config_error("experiment.snr_threshold_db must be sorted in increasing order", 0);
    if (variants.empty())
        throw config_error("experiment.variants must list at least one variant", 0);
    if (seeds.empty())
        throw config_error("experiment.seeds must list at least one seed", 0);
    if (output_dir.empty())
        throw config_error("experiment.output_dir cannot be empty", 0);
    try
    {
        scenario.validate();
        protocol.rounding.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw config_error(e.what(), 0);
    }
}

ExperimentConfig parse_config(std::string_view text, std::string_view source_name)
{
    toml::table root;
    try
    {
        root = toml::parse(text, source_name);
    }
    catch (const toml::parse_error &e)
    {
        throw config_error(std::string(e.description()), static_cast<int>(e.source().begin.line));
    }

    static const std::set<std::string> sections = {"scenario", "experiment", "rounding", "solver", "protocol"};
    for (const auto &[k, v] : root)
        if (!sections.contains(std::string(k.str())))
            throw config_error("unknown key " + std::string(k.str()), line_of(v));

    ExperimentConfig cfg;
    cfg.variants = {Variant::p3, Variant::p4, Variant::sweep};

    Section scenario(section_table(root, "scenario"), "scenario");
    read_scenario(scenario, cfg.scenario);
    scenario.finish();

    Section experiment(section_table(root, "experiment"), "experiment");
    read_experiment(experiment, cfg);
    experiment.finish();

    Section rounding(section_table(root, "rounding"), "rounding");
    read_rounding(rounding, cfg.protocol.rounding);
    rounding.finish();

    Section solver(section_table(root, "solver"), "solver");
    read_solver(solver, cfg.protocol.solver);
    solver.finish();

    Section protocol(section_table(root, "protocol"), "protocol");
    read_protocol(protocol, cfg.protocol);
    protocol.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig validate_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open " + path.string(), 0);
    std::ostringstream text;
    text << in.rdbuf();
    try
    {
        return parse_config(text.str(), path.string());
    }
    catch (const config_error &e)
    {
        const std::string where = e.line() > 0 ? path.string() + ":" + std::to_string(e.line()) : path.string();
        throw config_error(where + ": " + e.what(), e.line());
    }
}

void apply_desk_scale(ExperimentConfig &cfg)
{
    cfg.scenario.num_bs_antennas = 16;
    cfg.scenario.num_beams = 16;
    cfg.scenario.num_zones = 10;
    cfg.scenario.num_rings = 0;
    cfg.scenario.num_ris_elements = 16;
}

} // namespace risia
