// SPDX-License-Identifier: Apache-2.0
//
// cranloc: source localization over capacity-limited C-RAN fronthaul
// Copyright (C) 2026 The cranloc authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cranloc/indirect_localizer.hpp"
#include "cranloc/scenario.hpp"
#include "cranloc/search_grid.hpp"

namespace cranloc
{

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Method
{
    DirectQuantized,
    DirectDithered,
    DirectIdeal,
    Indirect,
};

std::string to_string(Method m);
Method parse_method(const std::string &name);

/// Physical layout shared by every sweep cell. Noise power and fronthaul
/// rates are filled in per cell by build_scenario().
struct ScenarioConfig
{
    std::vector<Position> radio_units{{0.0, 0.0}, {4000.0, 0.0}, {4000.0, 4000.0}, {0.0, 4000.0}};
    int num_antennas = 8;
    Region region{500.0, 3500.0, 500.0, 3500.0};
    double carrier_frequency = 900e6;
    double antenna_spacing_wavelengths = 0.5;
    double sampling_period = 2.5e-6;
    int num_samples = 8;
    double propagation_speed = 3.0e8;
    double mean_channel_power = 1.0;
    double rician_k_db = 20.0;

    double wavelength() const { return propagation_speed / carrier_frequency; }
};

struct CalibrationConfig
{
    double coverage = 0.95;
    int draws = 1000;
    /// Calibrated dynamic range per radio unit, keyed by SNR in dB.
    std::map<double, std::vector<double>> r_max_by_snr;
};

struct CrbSweepConfig
{
    std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0, 10.0};
    std::vector<double> b_over_m{4.0};
    int positions = 200;
};

struct ExperimentConfig
{
    ScenarioConfig scenario;
    std::vector<double> snr_db{0.0, 5.0};
    std::vector<double> b_over_m{2.0, 4.0, 6.0, 8.0};
    std::vector<double> fronthaul_pattern{1.0, 1.0, 1.0, 2.0}; // B_j = pattern_j * B
    int trials = 500;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::DirectQuantized, Method::DirectDithered, Method::DirectIdeal,
                                Method::Indirect};
    std::vector<double> dither_divisors{2.0};
    SearchGrid grid;
    CalibrationConfig calibration;
    TransmitTimePrior t0_prior{0.0, 10e-6}; // [0, N_s T_s / 2]
    bool t0_on_grid = true;                 // draw t0 from the estimator's t0 grid
    IndirectOptions indirect{};
    CrbSweepConfig crb;
    int threads = 1;

    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;
};

/// Transmit-time prior used for trial draws (t0 grid step applied when t0_on_grid).
TransmitTimePrior trial_t0_prior(const ExperimentConfig &cfg);

/// Noise variance giving SNR = E[|b|^2] / (N_s sigma^2).
double noise_power_for_snr(double mean_channel_power, int num_samples, double snr_db);

/// Concrete scenario for one sweep cell. `r_max` may be empty (uncalibrated).
Scenario build_scenario(const ScenarioConfig &cfg, double snr_db, double b_over_m,
                        const std::vector<double> &fronthaul_pattern, const std::vector<double> &r_max = {});

/// Calibrated ranges for an SNR, if present.
std::optional<std::vector<double>> find_calibration(const CalibrationConfig &cal, double snr_db);

nlohmann::json to_json(const ExperimentConfig &cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json &j);

ExperimentConfig load_config(const std::filesystem::path &path);
void save_config(const ExperimentConfig &cfg, const std::filesystem::path &path);

/// Deterministic 64-bit seed from a master seed and a list of tags (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);
std::uint64_t seed_tag(double value);

} // namespace cranloc
