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

#ifndef RISIA_CONFIG_HPP
#define RISIA_CONFIG_HPP

#include "risia/protocol.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace risia
{

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Parse, type, range or unknown-key error. line is 1-based, 0 when no line applies.
class config_error : public std::runtime_error
{
  public:
    config_error(const std::string &message, int line);
    int line() const { return line_; }

  private:
    int line_;
};

// One experiment: the (variant, threshold, seed) grid plus every knob of the protocol.
// Scenario values are stored linear; the file carries dB, dBm and degrees.
struct ExperimentConfig
{
    ScenarioParams scenario;
    std::vector<double> thresholds_db;
    std::vector<Variant> variants;
    std::vector<std::uint64_t> seeds;
    bool randomize_ris = true; // seed != 0 draws the RIS azimuth; false keeps it fixed
    ProtocolConfig protocol;
    std::string output_dir = "results";

    // Throws config_error (line 0) when an invariant does not hold.
    void validate() const;
};

// Parses TOML text. Keys not listed in the schema are rejected.
ExperimentConfig parse_config(std::string_view text, std::string_view source_name = "config");

// Reads and parses a file; the error message carries "path:line:".
ExperimentConfig validate_config(const std::filesystem::path &path);

// Reduces the scenario to N = N_a = 16, Q = 10, M = 16.
void apply_desk_scale(ExperimentConfig &cfg);

} // namespace risia

#endif
