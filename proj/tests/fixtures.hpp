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

#include <random>
#include <vector>

#include "cranloc/config.hpp"
#include "cranloc/scenario.hpp"

namespace fixture
{

/// Square layout with radio units on the corners of [0, side]^2 and the
/// region inset by `margin`.
inline cranloc::Scenario square(int num_antennas = 4, int num_samples = 8, double noise_power = 0.01,
                                double side = 4000.0, double margin = 500.0, std::size_t num_ru = 4)
{
    cranloc::Scenario scn;
    const std::vector<cranloc::Position> corners{{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
    for (std::size_t j = 0; j < num_ru; ++j)
    {
        cranloc::RadioUnit ru;
        ru.position = corners[j % corners.size()];
        ru.num_antennas = num_antennas;
        ru.noise_power = noise_power;
        ru.fronthaul_bits = 4.0 * num_antennas;
        ru.mean_channel_power = 1.0;
        ru.dynamic_range = 0.0;
        scn.radio_units.push_back(ru);
    }
    scn.region = {margin, side - margin, margin, side - margin};
    scn.wavelength = 3e8 / 900e6;
    scn.antenna_spacing = 0.5 * scn.wavelength;
    scn.sampling_period = 2.5e-6;
    scn.num_samples = num_samples;
    scn.propagation_speed = 3e8;
    scn.rician_k = 100.0;
    scn.waveform = cranloc::sinc_waveform_spectrum(num_samples);
    return scn;
}

/// Single radio unit at the origin with a small region in its field of view.
inline cranloc::Scenario desk(int num_antennas, int num_samples, double noise_power)
{
    cranloc::Scenario scn = square(num_antennas, num_samples, noise_power, 4000.0, 500.0, 1);
    scn.region = {500.0, 1500.0, 500.0, 1500.0};
    return scn;
}

inline cranloc::Position uniform_in(const cranloc::Region &r, cranloc::Rng &rng)
{
    std::uniform_real_distribution<double> ux(r.x_min, r.x_max), uy(r.y_min, r.y_max);
    const double x = ux(rng);
    return {x, uy(rng)};
}

} // namespace fixture
