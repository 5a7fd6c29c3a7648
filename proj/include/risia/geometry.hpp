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

#ifndef RISIA_GEOMETRY_HPP
#define RISIA_GEOMETRY_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace risia
{

using cplx = std::complex<double>;

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

// Users per unit area at polar coordinates (radius, azimuth). Only relative values matter.
using UserDensity = std::function<double(double radius, double azimuth)>;

// Cell, array and link-budget parameters. All powers are linear (W), all angles in radians.
// The BS sits at the origin with its ULA along the x-axis; the served sector is
// [sector_start, sector_start + sector_extent] measured from that axis.
struct ScenarioParams
{
    double cell_radius = 1000.0;       // m
    int num_zones = 40;                // Q
    int num_rings = 0;                 // 0 = choose automatically from Q
    int num_bs_antennas = 64;          // N_a
    int num_beams = 64;                // N
    int num_ris_elements = 64;         // M, 0 disables the RIS
    double transmit_power = 1.0;       // P_t [W]
    double noise_power = 3.1622776601683794e-12; // sigma^2 [W], -85 dBm
    double ref_path_loss = 1e-3;       // C_0 at ref_distance, -30 dB
    double ref_distance = 1.0;         // D_0 [m]
    double decay_exponent = 2.75;      // alpha
    double wavelength = 299792458.0 / 28e9; // lambda [m]
    double bs_spacing = 0.0;           // d_a [m], 0 = lambda/2
    double ris_spacing = 0.0;          // d_m [m], 0 = lambda/2
    double ris_azimuth = std::numbers::pi / 4.0; // RIS location on the cell edge, 45 deg off broadside
    double sector_start = 0.0;
    double sector_extent = std::numbers::pi;
    int num_users = 100;
    double snr_threshold = 10.0;       // tau, linear

    UserDensity user_density;          // empty = uniform

    double effective_bs_spacing() const { return bs_spacing > 0.0 ? bs_spacing : 0.5 * wavelength; }
    double effective_ris_spacing() const { return ris_spacing > 0.0 ? ris_spacing : 0.5 * wavelength; }

    // Throws std::invalid_argument when a count, power or length is out of range.
    void validate() const;
};

struct Zone
{
    int index = 0;
    Point2 centroid;
    double weight = 0.0;          // expected number of users, w_q
    double distance_to_bs = 0.0;  // d_q
    double distance_to_ris = 0.0; // d_{r,q}
    double aod_bs = 0.0;          // angle between BS array axis and the zone direction
    double aod_ris = 0.0;         // angle between RIS array axis and the zone direction
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    double start_azimuth = 0.0;
    double end_azimuth = 0.0;
};

struct ChannelSet
{
    std::vector<Eigen::RowVectorXcd> direct;      // h_{d,q}^H, length N_a
    std::vector<Eigen::RowVectorXcd> ris_to_zone; // h_{r,q}^H, length M
    Eigen::MatrixXcd bs_to_ris;                   // G, M x N_a
    double ris_aod_bs = 0.0;                      // vartheta_0
    double ris_aoa = 0.0;                         // phi_i
    double bs_ris_distance = 0.0;                 // d_0
};

struct BeamCodebook
{
    std::vector<Eigen::VectorXcd> beams; // b_n, length N_a
    std::vector<double> beam_aods;       // varphi_n
};

struct CellScenario
{
    ScenarioParams params;
    std::vector<Zone> zones;
    ChannelSet channels;
    BeamCodebook codebook;
    Point2 ris_position;
    double ris_axis_azimuth = 0.0; // orientation of the RIS array axis

    int num_zones() const { return static_cast<int>(zones.size()); }
    int num_beams() const { return static_cast<int>(codebook.beams.size()); }
    int num_bs_antennas() const { return params.num_bs_antennas; }
    int num_ris_elements() const { return static_cast<int>(channels.bs_to_ris.rows()); }
    double noise_power() const { return params.noise_power; }
    double snr_threshold() const { return params.snr_threshold; }
};

// Thrown by snr() when no beam is active; the SNR is normalized by the active beam count.
class undefined_snr : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// ULA response (1/sqrt(N)) [1, e^{j pi phi}, ..., e^{j pi (N-1) phi}]^T with phi wrapped to [0,2).
Eigen::VectorXcd steering_vector(double phase_diff, int length);

// Reference-distance power law C_0 (d / D_0)^{-alpha}.
double path_loss(double distance, const ScenarioParams &params);

// Builds the annular-sector zone grid, beam codebook and all LoS channels.
// Seed 0 gives the canonical layout with the RIS at params.ris_azimuth; any other
// seed draws the RIS azimuth uniformly over the served sector (one realization).
CellScenario build_scenario(const ScenarioParams &params, std::uint64_t zone_layout_seed = 0);

// Ring count used for Q zones when ScenarioParams::num_rings is 0.
int default_ring_count(int num_zones);

// Unit-modulus RIS coefficients e^{j theta_i}.
Eigen::VectorXcd ris_coefficients(std::span<const double> phases);

// h_q^H = h_{r,q}^H diag(e^{j theta}) G + h_{d,q}^H. An empty phase span means theta = 0.
Eigen::RowVectorXcd effective_channel(const CellScenario &scenario, int zone, std::span<const double> phases);

// Omega_q = diag(h_{r,q}^H) G, so that h_{r,q}^H Theta G = t^H Omega_q.
Eigen::MatrixXcd cascaded_channel(const CellScenario &scenario, int zone);

// Q x N table of |h_q^H b_n|^2 for the given phases.
Eigen::MatrixXd beam_gains(const CellScenario &scenario, std::span<const double> phases);

// Average received SNR of a zone over the active beams. Throws undefined_snr if no beam is active.
double snr(const CellScenario &scenario, int zone, std::span<const int> beam_indicators, std::span<const double> phases);

// Same as snr() but reuses a beam_gains() table.
double snr_from_gains(const Eigen::MatrixXd &gains, int zone, std::span<const int> beam_indicators, double noise_power);

// Zones, channels (interleaved re/im arrays) and codebook, for golden-file regression.
nlohmann::json to_json(const CellScenario &scenario);

} // namespace risia

#endif
