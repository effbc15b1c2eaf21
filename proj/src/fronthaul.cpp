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

#include "cranloc/fronthaul.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cranloc
{

double UniformQuantizerSpec::threshold(int l) const
{
    if (l <= 0)
        return -std::numeric_limits<double>::infinity();
    if (l >= levels)
        return std::numeric_limits<double>::infinity();
    return -r_max + (l - 0.5) * step();
}

double UniformQuantizerSpec::representation(int l) const
{
    return -r_max + (l - 1) * step();
}

UniformQuantizerSpec make_quantizer(double r_max, int levels)
{
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw ScenarioError("make_quantizer: dynamic range must be positive and finite");
    if (levels < 2)
        throw ScenarioError("make_quantizer: at least 2 levels are required");
    return {r_max, levels};
}

int levels_for_rate(double fronthaul_bits, int num_antennas)
{
    if (!(fronthaul_bits > 0.0) || num_antennas < 1)
        throw ScenarioError("levels_for_rate: fronthaul bits and antenna count must be positive");
    const double bits_per_component = fronthaul_bits / (2.0 * num_antennas);
    if (bits_per_component > 30.0)
        throw ScenarioError("levels_for_rate: more than 30 bits per component is not supported");
    const auto levels = static_cast<int>(std::lround(std::exp2(bits_per_component)));
    return std::max(levels, 2);
}

UniformQuantizerSpec quantizer_for(const RadioUnit &ru)
{
    return make_quantizer(ru.dynamic_range, levels_for_rate(ru.fronthaul_bits, ru.num_antennas));
}

int quantize_component(double x, const UniformQuantizerSpec &q)
{
    // cell l is (q_{l-1}, q_l]
    const double u = (x + q.r_max) / q.step();
    const double l = std::ceil(u + 0.5);
    if (!(l > 1.0))
        return 1;
    if (l >= q.levels)
        return q.levels;
    return static_cast<int>(l);
}

double reconstruct(int l, const UniformQuantizerSpec &q)
{
    if (l < 1 || l > q.levels)
        throw ScenarioError("reconstruct: level index " + std::to_string(l) + " outside [1, " +
                            std::to_string(q.levels) + "]");
    return q.representation(l);
}

FronthaulOutput fronthaul_round_trip(const FreqObservation &obs, std::span<const UniformQuantizerSpec> quantizers,
                                     const DitherSpec &dither, Rng &rng)
{
    if (quantizers.size() != obs.ru.size())
        throw ScenarioError("fronthaul_round_trip: one quantizer per radio unit is required");
    if (dither.enabled && !(dither.divisor > 0.0))
        throw ScenarioError("fronthaul_round_trip: dither divisor must be positive");

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    FronthaulOutput out;
    out.quantized.ru.resize(obs.ru.size());
    out.recovered.ru.resize(obs.ru.size());

    for (std::size_t j = 0; j < obs.ru.size(); ++j)
    {
        const auto &r = obs.ru[j];
        const auto &q = quantizers[j];
        auto &unit_out = out.quantized.ru[j];
        unit_out.re_levels.resize(r.rows(), r.cols());
        unit_out.im_levels.resize(r.rows(), r.cols());
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
        if (dither.enabled)
        {
            const double half_width = q.step() / dither.divisor;
            for (Eigen::Index k = 0; k < r.cols(); ++k)
                for (Eigen::Index m = 0; m < r.rows(); ++m)
                {
                    const double re = unit(rng);
                    const double im = unit(rng);
                    d(m, k) = Complex(half_width * re, half_width * im);
                }
        }

        Eigen::MatrixXcd recovered(r.rows(), r.cols());
        for (Eigen::Index k = 0; k < r.cols(); ++k)
            for (Eigen::Index m = 0; m < r.rows(); ++m)
            {
                const Complex x = r(m, k) + d(m, k);
                const int l_re = quantize_component(x.real(), q);
                const int l_im = quantize_component(x.imag(), q);
                unit_out.re_levels(m, k) = l_re;
                unit_out.im_levels(m, k) = l_im;
                recovered(m, k) = Complex(q.representation(l_re), q.representation(l_im)) - d(m, k);
            }
        if (dither.enabled)
            unit_out.dither = std::move(d);
        out.recovered.ru[j] = std::move(recovered);
    }
    return out;
}

EffectiveWeights effective_weights(const Scenario &scn)
{
    EffectiveWeights w;
    w.gamma2.reserve(scn.num_radio_units());
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
    {
        const auto &ru = scn.radio_units[j];
        if (!(ru.fronthaul_bits > 0.0))
            throw ScenarioError("effective_weights: radio unit " + std::to_string(j) +
                                " has non-positive fronthaul rate");
        const double denom = std::expm1(ru.fronthaul_bits / ru.num_antennas * std::numbers::ln2);
        Eigen::VectorXd g(scn.num_samples);
        for (int k = 0; k < scn.num_samples; ++k)
        {
            const double input_power = ru.mean_channel_power * std::norm(scn.waveform.coefficients(k)) + ru.noise_power;
            g(k) = ru.noise_power + input_power / denom;
        }
        w.gamma2.push_back(std::move(g));
    }
    return w;
}

EffectiveWeights unquantized_weights(const Scenario &scn)
{
    EffectiveWeights w;
    for (const auto &ru : scn.radio_units)
        w.gamma2.push_back(Eigen::VectorXd::Constant(scn.num_samples, ru.noise_power));
    return w;
}

std::vector<double> calibrate_dynamic_range(const Scenario &scn, double coverage, int draws,
                                            const TransmitTimePrior &t0_prior, Rng &rng)
{
    if (!(coverage > 0.0 && coverage < 1.0))
        throw ScenarioError("calibrate_dynamic_range: coverage must lie in (0, 1)");
    if (draws < 1000)
        throw ScenarioError("calibrate_dynamic_range: at least 1000 draws are required");

    const std::size_t nru = scn.num_radio_units();
    std::vector<std::vector<double>> samples(nru);
    for (std::size_t j = 0; j < nru; ++j)
        samples[j].reserve(static_cast<std::size_t>(draws) * 2 * scn.radio_units[j].num_antennas * scn.num_samples);

    for (int n = 0; n < draws; ++n)
    {
        const ChannelDraw draw = draw_channel(scn, t0_prior, rng);
        const FreqObservation obs = synthesize_observation(scn, draw, rng);
        for (std::size_t j = 0; j < nru; ++j)
        {
            const auto &r = obs.ru[j];
            for (Eigen::Index k = 0; k < r.cols(); ++k)
                for (Eigen::Index m = 0; m < r.rows(); ++m)
                {
                    samples[j].push_back(std::abs(r(m, k).real()));
                    samples[j].push_back(std::abs(r(m, k).imag()));
                }
        }
    }

    std::vector<double> r_max(nru);
    for (std::size_t j = 0; j < nru; ++j)
    {
        auto &s = samples[j];
        auto idx = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(s.size())));
        idx = std::clamp<std::size_t>(idx, 1, s.size()) - 1;
        std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(idx), s.end());
        r_max[j] = s[idx];
        if (!(r_max[j] > 0.0))
            throw ScenarioError("calibrate_dynamic_range: radio unit " + std::to_string(j) +
                                " has a degenerate (zero) dynamic range");
    }
    return r_max;
}

} // namespace cranloc
