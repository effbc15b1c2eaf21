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

#include <span>
#include <vector>

#include "cranloc/direct_localizer.hpp"
#include "cranloc/scenario.hpp"
#include "cranloc/search_grid.hpp"

namespace cranloc
{

struct RuMeasurement
{
    double toa = 0.0;     // estimate of tau_j(p) + t0, modulo the observation window
    double aoa = 0.0;     // radians
    double toa_var = 1.0; // s^2; infinity disables the term
    double aoa_var = 1.0; // rad^2; infinity disables the term
};

struct MeasurementSet
{
    std::vector<RuMeasurement> ru;
};

struct MusicResult
{
    double estimate = 0.0;
    std::vector<double> spectrum; // pseudo-spectrum on the supplied lattice
    bool significant_peak = false; // peak above 10x the median
};

/// Spatial MUSIC: one snapshot per DFT bin, single-source signal subspace.
MusicResult music_aoa(const Eigen::MatrixXcd &obs, int num_antennas, double antenna_spacing, double wavelength,
                      std::span<const double> angle_lattice);

/// Frequency-domain MUSIC on y(k) = w^H R(k) / S(k) with forward sub-band smoothing.
/// `subband_length` 0 selects N_s / 2.
MusicResult music_toa(const Eigen::MatrixXcd &obs, const WaveformSpectrum &waveform, double sampling_period,
                      const Eigen::VectorXcd &combiner, std::span<const double> delay_lattice,
                      int subband_length = 0);

struct TransmitTimeFit
{
    double t0 = 0.0;
    double cost = 0.0; // sum_j w_j wrap(offset_j - t0)^2
};

/// Exact minimizer over t0 in [0, window) of the weighted sum of squared
/// window-wrapped residuals. With no wrapping this is the weighted mean.
TransmitTimeFit eliminate_transmit_time(std::span<const double> offsets, std::span<const double> weights,
                                        double window);

/// Residual wrapped into [-window/2, window/2).
double wrap_residual(double x, double window);

/// Angle wrapped into (-pi, pi].
double wrap_angle(double x);

struct FusionOptions
{
    bool use_toa = true;
    bool use_aoa = true;
};

/// Fused TOA/AOA residual at p, t0 eliminated. Returns the cost and the fitted t0.
TransmitTimeFit fusion_cost(const MeasurementSet &meas, const Scenario &scn, const Position &p,
                            const FusionOptions &options = {});

/// Lattice minimization of the fused TOA/AOA cost.
Estimate fuse_ml(const MeasurementSet &meas, const Scenario &scn, const SearchGrid &grid,
                 const FusionOptions &options = {});

struct IndirectOptions
{
    SearchGrid grid;
    FusionOptions fusion;
    double angle_resolution = 1e-3; // rad
    int delay_oversampling = 100;   // delay lattice spacing T_s / delay_oversampling
    int subband_length = 0;         // 0 = N_s / 2
};

/// Angle lattice covering the region as seen from a radio unit, limited to the half-plane
/// of the region centre since the linear array only resolves cos(phi).
std::vector<double> aoa_lattice_for(const Scenario &scn, std::size_t j, double resolution);

/// Per-RU MUSIC measurements with single-unit CRB fusion weights.
MeasurementSet measure_indirect(const Scenario &scn, const FreqObservation &obs, const IndirectOptions &options);

/// Two-step localization: measure_indirect followed by fuse_ml.
Estimate estimate_indirect(const Scenario &scn, const FreqObservation &obs, const IndirectOptions &options);

} // namespace cranloc
