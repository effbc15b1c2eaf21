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

#include "cranloc/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace cranloc
{

namespace
{
constexpr double pi = std::numbers::pi;
}

double Scenario::bin_frequency(int k) const
{
    return 2.0 * pi * k / (num_samples * sampling_period);
}

void Scenario::validate() const
{
    if (radio_units.empty())
        throw ScenarioError("Scenario: at least one radio unit is required");
    if (!(region.width() > 0.0) || !(region.height() > 0.0))
        throw ScenarioError("Scenario: search region must have positive area");
    if (!(sampling_period > 0.0))
        throw ScenarioError("Scenario: sampling period must be positive");
    if (num_samples < 1)
        throw ScenarioError("Scenario: num_samples must be >= 1");
    if (!(propagation_speed > 0.0) || !(wavelength > 0.0))
        throw ScenarioError("Scenario: propagation speed and wavelength must be positive");
    if (!(rician_k >= 0.0))
        throw ScenarioError("Scenario: Rician factor must be non-negative");
    if (waveform.size() != num_samples)
        throw ScenarioError("Scenario: waveform length " + std::to_string(waveform.size()) +
                            " does not match num_samples " + std::to_string(num_samples));
    if (std::abs(waveform.coefficients.squaredNorm() - 1.0) > 1e-12)
        throw ScenarioError("Scenario: waveform energy must be 1");

    for (std::size_t j = 0; j < radio_units.size(); ++j)
    {
        const auto &ru = radio_units[j];
        const std::string tag = "Scenario: radio unit " + std::to_string(j) + ": ";
        if (ru.num_antennas < 1)
            throw ScenarioError(tag + "num_antennas must be >= 1");
        if (!(ru.noise_power > 0.0))
            throw ScenarioError(tag + "noise power must be positive");
        if (!(ru.fronthaul_bits > 0.0))
            throw ScenarioError(tag + "fronthaul bits must be positive");
        if (!(ru.mean_channel_power >= 0.0))
            throw ScenarioError(tag + "mean channel power must be non-negative");
        if (!std::isfinite(ru.position.x) || !std::isfinite(ru.position.y))
            throw ScenarioError(tag + "position must be finite");
    }
}

double distance(const Position &p, const Position &p_j)
{
    return std::hypot(p.x - p_j.x, p.y - p_j.y);
}

double bearing(const Position &p, const Position &p_j)
{
    const double dx = p.x - p_j.x;
    const double dy = p.y - p_j.y;
    if (dx == 0.0 && dy == 0.0)
        throw ScenarioError("bearing: coincident points");
    // atan2 returns [-pi, pi]; fold -pi onto pi
    const double phi = std::atan2(dy, dx);
    return phi == -pi ? pi : phi;
}

Eigen::VectorXcd steering_vector(double phi, int num_antennas, double antenna_spacing, double wavelength)
{
    if (num_antennas < 1)
        throw ScenarioError("steering_vector: num_antennas must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    const double step = -2.0 * pi * antenna_spacing * std::cos(phi) / wavelength;
    Eigen::VectorXcd a(num_antennas);
    for (int m = 0; m < num_antennas; ++m)
        a(m) = std::polar(scale, step * m);
    return a;
}

double propagation_delay(const Position &p, const Position &p_j, double speed)
{
    if (!(speed > 0.0))
        throw ScenarioError("propagation_delay: speed must be positive");
    return distance(p, p_j) / speed;
}

WaveformSpectrum sinc_waveform_spectrum(int num_samples)
{
    if (num_samples < 1)
        throw ScenarioError("sinc_waveform_spectrum: num_samples must be >= 1");
    // sinc(n) sampled at integers is the unit impulse, so the DFT is flat
    WaveformSpectrum s;
    s.coefficients = Eigen::VectorXcd::Constant(num_samples, Complex(1.0 / std::sqrt(double(num_samples)), 0.0));
    return s;
}

FreqObservation noiseless_observation(const Scenario &scn, const ChannelDraw &draw)
{
    if (draw.gains.size() != scn.num_radio_units())
        throw ScenarioError("noiseless_observation: gain count does not match radio units");

    FreqObservation obs;
    obs.ru.reserve(scn.num_radio_units());
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
    {
        const auto &ru = scn.radio_units[j];
        Eigen::MatrixXcd r(ru.num_antennas, scn.num_samples);
        const double delay = propagation_delay(draw.source, ru.position, scn.propagation_speed) + draw.t0;
        // bearing is undefined on top of the array; any angle works since b alpha is then a plain gain
        const double phi = draw.source == ru.position ? 0.0 : bearing(draw.source, ru.position);
        const Eigen::VectorXcd alpha = steering_vector(phi, ru.num_antennas, scn.antenna_spacing, scn.wavelength);
        for (int k = 0; k < scn.num_samples; ++k)
        {
            const Complex phase = std::polar(1.0, -scn.bin_frequency(k) * delay);
            r.col(k) = draw.gains[j] * scn.waveform.coefficients(k) * phase * alpha;
        }
        obs.ru.push_back(std::move(r));
    }
    return obs;
}

FreqObservation synthesize_observation(const Scenario &scn, const ChannelDraw &draw, Rng &rng)
{
    FreqObservation obs = noiseless_observation(scn, draw);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
    {
        const double sd = std::sqrt(scn.radio_units[j].noise_power / 2.0);
        auto &r = obs.ru[j];
        for (Eigen::Index k = 0; k < r.cols(); ++k)
            for (Eigen::Index m = 0; m < r.rows(); ++m)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                r(m, k) += Complex(sd * re, sd * im);
            }
    }
    return obs;
}

Complex draw_rician_gain(double mean_power, double k_factor, Rng &rng)
{
    if (std::isinf(k_factor))
        return {std::sqrt(mean_power), 0.0};
    const double specular = std::sqrt(k_factor / (k_factor + 1.0) * mean_power);
    const double diffuse_sd = std::sqrt(mean_power / (k_factor + 1.0) / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {specular + diffuse_sd * re, diffuse_sd * im};
}

ChannelDraw draw_channel(const Scenario &scn, const TransmitTimePrior &t0_prior, Rng &rng)
{
    if (t0_prior.min < 0.0 || t0_prior.max < t0_prior.min || t0_prior.step < 0.0)
        throw ScenarioError("draw_channel: invalid transmit-time prior");

    ChannelDraw draw;
    std::uniform_real_distribution<double> ux(scn.region.x_min, scn.region.x_max);
    std::uniform_real_distribution<double> uy(scn.region.y_min, scn.region.y_max);
    draw.source.x = ux(rng);
    draw.source.y = uy(rng);
    draw.gains.reserve(scn.num_radio_units());
    for (const auto &ru : scn.radio_units)
        draw.gains.push_back(draw_rician_gain(ru.mean_channel_power, scn.rician_k, rng));
    if (t0_prior.step > 0.0)
    {
        const auto first = static_cast<std::int64_t>(std::ceil(t0_prior.min / t0_prior.step - 1e-9));
        const auto last = static_cast<std::int64_t>(std::floor(t0_prior.max / t0_prior.step + 1e-9));
        if (last < first)
            throw ScenarioError("draw_channel: no grid point inside the transmit-time prior");
        draw.t0 = t0_prior.step *
                  static_cast<double>(std::uniform_int_distribution<std::int64_t>(first, last)(rng));
    }
    else if (t0_prior.max > t0_prior.min)
        draw.t0 = std::uniform_real_distribution<double>(t0_prior.min, t0_prior.max)(rng);
    else
        draw.t0 = t0_prior.min;
    return draw;
}

} // namespace cranloc
