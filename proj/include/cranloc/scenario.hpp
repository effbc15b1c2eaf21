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

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace cranloc
{

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Raised for violated preconditions on scenario and estimator inputs.
class ScenarioError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct Position
{
    double x = 0.0; // meters
    double y = 0.0; // meters

    friend bool operator==(const Position &, const Position &) = default;
};

/// Axis-aligned search rectangle for the source position.
struct Region
{
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    bool contains(const Position &p) const
    {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

struct RadioUnit
{
    Position position;
    int num_antennas = 1;            // M
    double noise_power = 1.0;        // sigma^2 per complex DFT sample
    double fronthaul_bits = 1.0;     // B, bits per complex vector sample
    double mean_channel_power = 1.0; // E[|b|^2]
    double dynamic_range = 0.0;      // quantizer half-width; 0 until calibrated
};

/// DFT coefficients S(k) of the transmitted waveform, sum |S(k)|^2 == 1.
struct WaveformSpectrum
{
    Eigen::VectorXcd coefficients;

    Eigen::Index size() const { return coefficients.size(); }
};

struct Scenario
{
    std::vector<RadioUnit> radio_units;
    Region region;
    double wavelength = 1.0;
    double antenna_spacing = 0.5;
    double sampling_period = 1.0;
    int num_samples = 1;
    double propagation_speed = 3.0e8;
    double rician_k = 100.0; // linear
    WaveformSpectrum waveform;

    std::size_t num_radio_units() const { return radio_units.size(); }
    double window() const { return num_samples * sampling_period; }
    /// Angular frequency w_k = 2 pi k / (N_s T_s).
    double bin_frequency(int k) const;

    /// Throws ScenarioError when an invariant does not hold.
    void validate() const;
};

/// Uniform prior for the unknown transmit time. With step > 0 the draw is
/// restricted to the multiples of step inside [min, max].
struct TransmitTimePrior
{
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;
};

struct ChannelDraw
{
    std::vector<Complex> gains; // b_j
    double t0 = 0.0;
    Position source;
};

/// Received DFT-domain samples R_j(k), one M x N_s matrix per radio unit.
struct FreqObservation
{
    std::vector<Eigen::MatrixXcd> ru;
};

double distance(const Position &p, const Position &p_j);

/// Four-quadrant angle of p as seen from p_j, in (-pi, pi].
double bearing(const Position &p, const Position &p_j);

/// ULA response (1/sqrt(M)) exp(-i 2 pi m spacing cos(phi) / lambda), m = 0..M-1.
Eigen::VectorXcd steering_vector(double phi, int num_antennas, double antenna_spacing, double wavelength);

double propagation_delay(const Position &p, const Position &p_j, double speed);

/// Flat spectrum of the sampled sinc pulse sinc(t/T_s)/sqrt(N_s).
WaveformSpectrum sinc_waveform_spectrum(int num_samples);

/// Noise-free term b_j alpha_j(p) S(k) exp(-i w_k (tau_j(p) + t0)).
FreqObservation noiseless_observation(const Scenario &scn, const ChannelDraw &draw);

/// Noiseless term plus circular complex Gaussian noise of variance sigma_j^2 per sample.
FreqObservation synthesize_observation(const Scenario &scn, const ChannelDraw &draw, Rng &rng);

/// Uniform source over the region, Rician gains, uniform t0 over the prior.
ChannelDraw draw_channel(const Scenario &scn, const TransmitTimePrior &t0_prior, Rng &rng);

/// Draw a Rician coefficient with zero-phase specular part.
Complex draw_rician_gain(double mean_power, double k_factor, Rng &rng);

} // namespace cranloc
