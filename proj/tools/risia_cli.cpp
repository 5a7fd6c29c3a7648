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

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace
{

enum ExitCode
{
    exit_ok = 0,
    exit_config = 2,
    exit_io = 3,
    exit_incomplete = 4
};

nlohmann::json describe(const risia::ExperimentConfig &cfg)
{
    const auto &s = cfg.scenario;
    nlohmann::json j;
    j["scenario"] = {{"cell_radius_m", s.cell_radius},
                     {"num_zones", s.num_zones},
                     {"num_bs_antennas", s.num_bs_antennas},
                     {"num_beams", s.num_beams},
                     {"num_ris_elements", s.num_ris_elements},
                     {"transmit_power_w", s.transmit_power},
                     {"noise_power_w", s.noise_power},
                     {"ref_path_loss", s.ref_path_loss},
                     {"ref_distance_m", s.ref_distance},
                     {"decay_exponent", s.decay_exponent},
                     {"wavelength_m", s.wavelength},
                     {"bs_spacing_m", s.effective_bs_spacing()},
                     {"ris_spacing_m", s.effective_ris_spacing()},
                     {"num_users", s.num_users}};
    nlohmann::json variants = nlohmann::json::array();
    for (auto v : cfg.variants)
        variants.push_back(risia::to_string(v));
    j["experiment"] = {{"snr_threshold_db", cfg.thresholds_db},
                       {"variants", variants},
                       {"seeds", cfg.seeds},
                       {"output_dir", cfg.output_dir}};
    return j;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Initial access for RIS-assisted mmWave cells: experiment driver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    bool desk = false;
    auto *run = app.add_subcommand("run", "Run the (variant, threshold, seed) grid of a config file");
    run->add_option("--config", config_path, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides RISIA_OUTPUT_DIR and the config)");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--desk", desk, "Reduce the scenario to N = N_a = 16, Q = 10, M = 16");

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Parse a config file and print the resolved values");
    validate->add_option("--config", validate_path, "Experiment config (TOML)")->required();

    std::string csv_path;
    std::string svg_path;
    auto *plot = app.add_subcommand("plot", "Render mean timeslots against threshold from an aggregate CSV");
    plot->add_option("--csv", csv_path, "aggregate.csv")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", svg_path, "Output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            risia::ExperimentConfig cfg = risia::validate_config(config_path);
            if (desk)
                risia::apply_desk_scale(cfg);
            risia::ExperimentOptions opts;
            opts.output_dir = out_dir;
            opts.jobs = jobs;
            const risia::ExperimentReport report = risia::run_experiment(cfg, opts);
            std::cout << report.records.size() << " runs written to " << report.output_dir.string() << "\n";
            if (!report.complete)
            {
                std::cerr << "experiment incomplete: " << report.error << "\n";
                return exit_incomplete;
            }
        }
        else if (*validate)
        {
            const risia::ExperimentConfig cfg = risia::validate_config(validate_path);
            std::cout << describe(cfg).dump(2) << "\n";
        }
        else if (*plot)
        {
            std::ifstream in(csv_path);
            const auto rows = risia::read_aggregate_csv(in);
            std::ofstream out(svg_path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + svg_path);
            out << risia::render_slots_svg(rows);
        }
    }
    catch (const risia::config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_ok;
}
