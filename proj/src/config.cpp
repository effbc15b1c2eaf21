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

#include "cranloc/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <string_view>

#include "cranloc/fronthaul.hpp"

namespace cranloc
{

using nlohmann::json;

namespace
{

const std::pair<Method, const char *> method_names[] = {
    {Method::DirectQuantized, "direct-quantized"},
    {Method::DirectDithered, "direct-dithered"},
    {Method::DirectIdeal, "direct-ideal"},
    {Method::Indirect, "indirect"},
};

template <class T>
void read(const json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

// Rejects keys outside `allowed` so that typos do not silently fall back to defaults.
void expect_keys(const json &j, const std::string &where, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
    for (const auto &item : j.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::string to_string(Method m)
{
    for (const auto &[method, name] : method_names)
        if (method == m)
            return name;
    return "unknown";
}

Method parse_method(const std::string &name)
{
    for (const auto &[method, n] : method_names)
        if (name == n)
            return method;
    throw ConfigError("unknown method '" + name +
                      "' (expected direct-quantized, direct-dithered, direct-ideal or indirect)");
}

void ExperimentConfig::validate() const
{
    if (scenario.radio_units.empty())
        throw ConfigError("config: at least one radio unit is required");
    if (scenario.num_antennas < 1 || scenario.num_samples < 1)
        throw ConfigError("config: num_antennas and num_samples must be >= 1");
    if (!(scenario.carrier_frequency > 0.0) || !(scenario.sampling_period > 0.0) ||
        !(scenario.propagation_speed > 0.0))
        throw ConfigError("config: carrier frequency, sampling period and speed must be positive");
    if (snr_db.empty() || b_over_m.empty())
        throw ConfigError("config: snr_db and b_over_m lists must be non-empty");
    if (methods.empty())
        throw ConfigError("config: method list must be non-empty");
    if (trials < 1)
        throw ConfigError("config: trials must be >= 1");
    if (threads < 1)
        throw ConfigError("config: threads must be >= 1");
    if (fronthaul_pattern.size() != scenario.radio_units.size())
        throw ConfigError("config: fronthaul_pattern needs one entry per radio unit");
    for (double f : fronthaul_pattern)
        if (!(f > 0.0))
            throw ConfigError("config: fronthaul_pattern entries must be positive");
    for (double b : b_over_m)
        if (!(b > 0.0))
            throw ConfigError("config: b_over_m entries must be positive");
    for (double d : dither_divisors)
        if (!(d > 0.0))
            throw ConfigError("config: dither divisors must be positive");
    if (dither_divisors.empty())
        for (Method m : methods)
            if (m == Method::DirectDithered)
                throw ConfigError("config: direct-dithered requires at least one dither divisor");
    if (!(calibration.coverage > 0.0 && calibration.coverage < 1.0))
        throw ConfigError("config: calibration coverage must lie in (0, 1)");
    if (calibration.draws < 1000)
        throw ConfigError("config: calibration draws must be >= 1000");
    if (t0_prior.min < 0.0 || t0_prior.max < t0_prior.min || t0_prior.step != 0.0)
        throw ConfigError("config: invalid t0 prior");
    if (crb.positions < 1)
        throw ConfigError("config: crb positions must be >= 1");
    try
    {
        grid.validate();
    }
    catch (const ScenarioError &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

TransmitTimePrior trial_t0_prior(const ExperimentConfig &cfg)
{
    TransmitTimePrior prior = cfg.t0_prior;
    if (cfg.t0_on_grid)
        prior.step = cfg.scenario.sampling_period / cfg.grid.t0_oversampling;
    return prior;
}

double noise_power_for_snr(double mean_channel_power, int num_samples, double snr_db)
{
    return mean_channel_power / (num_samples * std::pow(10.0, snr_db / 10.0));
}

Scenario build_scenario(const ScenarioConfig &cfg, double snr_db, double b_over_m,
                        const std::vector<double> &fronthaul_pattern, const std::vector<double> &r_max)
{
    if (fronthaul_pattern.size() != cfg.radio_units.size())
        throw ConfigError("build_scenario: fronthaul_pattern needs one entry per radio unit");
    if (!r_max.empty() && r_max.size() != cfg.radio_units.size())
        throw ConfigError("build_scenario: r_max needs one entry per radio unit");

    Scenario scn;
    scn.region = cfg.region;
    scn.wavelength = cfg.wavelength();
    scn.antenna_spacing = cfg.antenna_spacing_wavelengths * scn.wavelength;
    scn.sampling_period = cfg.sampling_period;
    scn.num_samples = cfg.num_samples;
    scn.propagation_speed = cfg.propagation_speed;
    scn.rician_k = std::pow(10.0, cfg.rician_k_db / 10.0);
    scn.waveform = sinc_waveform_spectrum(cfg.num_samples);
    const double sigma2 = noise_power_for_snr(cfg.mean_channel_power, cfg.num_samples, snr_db);
    for (std::size_t j = 0; j < cfg.radio_units.size(); ++j)
    {
        RadioUnit ru;
        ru.position = cfg.radio_units[j];
        ru.num_antennas = cfg.num_antennas;
        ru.noise_power = sigma2;
        ru.fronthaul_bits = fronthaul_pattern[j] * b_over_m * cfg.num_antennas;
        ru.mean_channel_power = cfg.mean_channel_power;
        ru.dynamic_range = r_max.empty() ? 0.0 : r_max[j];
        scn.radio_units.push_back(ru);
    }
    scn.validate();
    return scn;
}

std::optional<std::vector<double>> find_calibration(const CalibrationConfig &cal, double snr_db)
{
    for (const auto &[snr, values] : cal.r_max_by_snr)
        if (std::abs(snr - snr_db) < 1e-9)
            return values;
    return std::nullopt;
}

json to_json(const ExperimentConfig &cfg)
{
    json ru = json::array();
    for (const auto &p : cfg.scenario.radio_units)
        ru.push_back({{"x", p.x}, {"y", p.y}});
    json methods = json::array();
    for (Method m : cfg.methods)
        methods.push_back(to_string(m));
    json r_max = json::array();
    for (const auto &[snr, values] : cfg.calibration.r_max_by_snr)
        r_max.push_back({{"snr_db", snr}, {"r_max", values}});

    const auto &s = cfg.scenario;
    return json{
        {"scenario",
         {{"radio_units", ru},
          {"num_antennas", s.num_antennas},
          {"region", {{"x_min", s.region.x_min}, {"x_max", s.region.x_max}, {"y_min", s.region.y_min},
                      {"y_max", s.region.y_max}}},
          {"carrier_frequency", s.carrier_frequency},
          {"antenna_spacing_wavelengths", s.antenna_spacing_wavelengths},
          {"sampling_period", s.sampling_period},
          {"num_samples", s.num_samples},
          {"propagation_speed", s.propagation_speed},
          {"mean_channel_power", s.mean_channel_power},
          {"rician_k_db", s.rician_k_db}}},
        {"sweep", {{"snr_db", cfg.snr_db}, {"b_over_m", cfg.b_over_m}, {"fronthaul_pattern", cfg.fronthaul_pattern}}},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"methods", methods},
        {"dither", {{"divisors", cfg.dither_divisors}}},
        {"grid",
         {{"spacing", cfg.grid.spacing},
          {"t0_oversampling", cfg.grid.t0_oversampling},
          {"zoom_rounds", cfg.grid.zoom_rounds},
          {"zoom_factor", cfg.grid.zoom_factor}}},
        {"calibration", {{"coverage", cfg.calibration.coverage}, {"draws", cfg.calibration.draws}, {"r_max_by_snr", r_max}}},
        {"t0_prior", {{"min", cfg.t0_prior.min}, {"max", cfg.t0_prior.max}, {"on_grid", cfg.t0_on_grid}}},
        {"indirect",
         {{"angle_resolution", cfg.indirect.angle_resolution},
          {"delay_oversampling", cfg.indirect.delay_oversampling},
          {"subband_length", cfg.indirect.subband_length},
          {"use_toa", cfg.indirect.fusion.use_toa},
          {"use_aoa", cfg.indirect.fusion.use_aoa}}},
        {"crb", {{"snr_db", cfg.crb.snr_db}, {"b_over_m", cfg.crb.b_over_m}, {"positions", cfg.crb.positions}}},
        {"conventions",
         {{"snr", "E[|b|^2] / (num_samples * noise_power), noise_power per complex DFT sample"},
          {"t0_draw", "uniform over the t0 grid points (step T_s / t0_oversampling) inside the prior when on_grid, "
                      "continuous uniform otherwise"},
          {"fronthaul_bits", "B_j = fronthaul_pattern_j * b_over_m * num_antennas"},
          {"levels", "round(2^(B_j / (2 num_antennas))), at least 2"},
          {"dither", "subtractive, uniform on [-step/divisor, step/divisor] per real component"},
          {"rician_specular_phase", 0.0},
          {"crb_transmit_time", "known"}}},
    };
}

ExperimentConfig experiment_config_from_json(const json &j)
{
    ExperimentConfig cfg;
    expect_keys(j, "top level",
                {"scenario", "sweep", "trials", "seed", "threads", "methods", "dither", "grid", "calibration",
                 "t0_prior", "indirect", "crb", "conventions"});
    try
    {
        if (j.contains("scenario"))
        {
            const json &s = j.at("scenario");
            expect_keys(s, "scenario",
                        {"radio_units", "num_antennas", "region", "carrier_frequency", "antenna_spacing_wavelengths",
                         "sampling_period", "num_samples", "propagation_speed", "mean_channel_power", "rician_k_db"});
            auto &sc = cfg.scenario;
            if (s.contains("radio_units"))
            {
                sc.radio_units.clear();
                for (const auto &p : s.at("radio_units"))
                    sc.radio_units.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
            }
            read(s, "num_antennas", sc.num_antennas);
            if (s.contains("region"))
            {
                const json &r = s.at("region");
                sc.region = {r.at("x_min").get<double>(), r.at("x_max").get<double>(), r.at("y_min").get<double>(),
                             r.at("y_max").get<double>()};
            }
            read(s, "carrier_frequency", sc.carrier_frequency);
            read(s, "antenna_spacing_wavelengths", sc.antenna_spacing_wavelengths);
            read(s, "sampling_period", sc.sampling_period);
            read(s, "num_samples", sc.num_samples);
            read(s, "propagation_speed", sc.propagation_speed);
            read(s, "mean_channel_power", sc.mean_channel_power);
            read(s, "rician_k_db", sc.rician_k_db);
        }
        if (j.contains("sweep"))
        {
            const json &s = j.at("sweep");
            expect_keys(s, "sweep", {"snr_db", "b_over_m", "fronthaul_pattern"});
            read(s, "snr_db", cfg.snr_db);
            read(s, "b_over_m", cfg.b_over_m);
            read(s, "fronthaul_pattern", cfg.fronthaul_pattern);
        }
        read(j, "trials", cfg.trials);
        read(j, "seed", cfg.seed);
        read(j, "threads", cfg.threads);
        if (j.contains("methods"))
        {
            cfg.methods.clear();
            for (const auto &m : j.at("methods"))
                cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("dither"))
        {
            expect_keys(j.at("dither"), "dither", {"divisors"});
            read(j.at("dither"), "divisors", cfg.dither_divisors);
        }
        if (j.contains("grid"))
        {
            const json &g = j.at("grid");
            expect_keys(g, "grid", {"spacing", "t0_oversampling", "zoom_rounds", "zoom_factor"});
            read(g, "spacing", cfg.grid.spacing);
            read(g, "t0_oversampling", cfg.grid.t0_oversampling);
            read(g, "zoom_rounds", cfg.grid.zoom_rounds);
            read(g, "zoom_factor", cfg.grid.zoom_factor);
        }
        if (j.contains("calibration"))
        {
            const json &c = j.at("calibration");
            expect_keys(c, "calibration", {"coverage", "draws", "r_max_by_snr"});
            read(c, "coverage", cfg.calibration.coverage);
            read(c, "draws", cfg.calibration.draws);
            if (c.contains("r_max_by_snr"))
                for (const auto &entry : c.at("r_max_by_snr"))
                    cfg.calibration.r_max_by_snr[entry.at("snr_db").get<double>()] =
                        entry.at("r_max").get<std::vector<double>>();
        }
        if (j.contains("t0_prior"))
        {
            expect_keys(j.at("t0_prior"), "t0_prior", {"min", "max", "on_grid"});
            read(j.at("t0_prior"), "min", cfg.t0_prior.min);
            read(j.at("t0_prior"), "max", cfg.t0_prior.max);
            read(j.at("t0_prior"), "on_grid", cfg.t0_on_grid);
        }
        if (j.contains("indirect"))
        {
            const json &i = j.at("indirect");
            expect_keys(i, "indirect",
                        {"angle_resolution", "delay_oversampling", "subband_length", "use_toa", "use_aoa"});
            read(i, "angle_resolution", cfg.indirect.angle_resolution);
            read(i, "delay_oversampling", cfg.indirect.delay_oversampling);
            read(i, "subband_length", cfg.indirect.subband_length);
            read(i, "use_toa", cfg.indirect.fusion.use_toa);
            read(i, "use_aoa", cfg.indirect.fusion.use_aoa);
        }
        if (j.contains("crb"))
        {
            const json &c = j.at("crb");
            expect_keys(c, "crb", {"snr_db", "b_over_m", "positions"});
            read(c, "snr_db", cfg.crb.snr_db);
            read(c, "b_over_m", cfg.crb.b_over_m);
            read(c, "positions", cfg.crb.positions);
        }
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("config: malformed field: ") + e.what());
    }
    cfg.indirect.grid = cfg.grid;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

void save_config(const ExperimentConfig &cfg, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write config file " + path.string());
    out << to_json(cfg).dump(2) << '\n';
    if (!out)
        throw ConfigError("failed writing config file " + path.string());
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t t : tags)
        h = splitmix64(h ^ splitmix64(t));
    return h;
}

std::uint64_t seed_tag(double value)
{
    return std::bit_cast<std::uint64_t>(value == 0.0 ? 0.0 : value);
}

} // namespace cranloc
