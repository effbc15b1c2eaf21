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

#include <optional>
#include <span>
#include <vector>

#include "cranloc/scenario.hpp"

namespace cranloc
{

/// Mid-rise uniform quantizer over [-r_max, r_max] with L representation points.
struct UniformQuantizerSpec
{
    double r_max = 1.0;
    int levels = 2;

    double step() const { return 2.0 * r_max / (levels - 1); }
    /// Upper threshold of cell l, -r_max + (l - 0.5) step; +-inf at the ends.
    double threshold(int l) const;
    double representation(int l) const;
};

/// Validating factory; throws ScenarioError on r_max <= 0 or levels < 2.
UniformQuantizerSpec make_quantizer(double r_max, int levels);

/// L = round(2^{B / (2M)}), at least 2.
int levels_for_rate(double fronthaul_bits, int num_antennas);

/// Quantizer of a radio unit from its calibrated range and fronthaul rate.
UniformQuantizerSpec quantizer_for(const RadioUnit &ru);

/// Subtractive dither, uniform on [-step/divisor, step/divisor].
struct DitherSpec
{
    double divisor = 2.0;
    bool enabled = false;
};

/// Level indices (1-based) sent over the fronthaul, plus the dither kept for subtraction.
struct QuantizedObservation
{
    struct Unit
    {
        Eigen::MatrixXi re_levels; // M x N_s
        Eigen::MatrixXi im_levels;
        std::optional<Eigen::MatrixXcd> dither;
    };
    std::vector<Unit> ru;
};

struct FronthaulOutput
{
    QuantizedObservation quantized;
    FreqObservation recovered; // reconstruction minus dither
};

/// gamma_j^2(k) per radio unit and DFT bin.
struct EffectiveWeights
{
    std::vector<Eigen::VectorXd> gamma2;
};

int quantize_component(double x, const UniformQuantizerSpec &q);

/// Throws ScenarioError for l outside [1, L].
double reconstruct(int l, const UniformQuantizerSpec &q);

/// Dither, quantize, reconstruct and subtract the dither for every Re/Im component.
FronthaulOutput fronthaul_round_trip(const FreqObservation &obs, std::span<const UniformQuantizerSpec> quantizers,
                                     const DitherSpec &dither, Rng &rng);

/// Rate-distortion effective noise sigma^2 + (E|b|^2 |S(k)|^2 + sigma^2) / (2^{B/M} - 1).
EffectiveWeights effective_weights(const Scenario &scn);

/// Weights for an ideal fronthaul (gamma^2 = sigma^2).
EffectiveWeights unquantized_weights(const Scenario &scn);

/// Per-RU coverage-quantile of |Re|, |Im| pooled over antennas, bins and Monte Carlo draws.
std::vector<double> calibrate_dynamic_range(const Scenario &scn, double coverage, int draws,
                                            const TransmitTimePrior &t0_prior, Rng &rng);

} // namespace cranloc
