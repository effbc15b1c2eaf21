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

#include "cranloc/indirect_localizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "cranloc/crb.hpp"

namespace cranloc
{

namespace
{
constexpr double pi = std::numbers::pi;

// MUSIC pseudo-spectrum 1 / ||E_n^H a||^2 for unit-norm manifold vectors.
template <class Manifold>
MusicResult music_scan(const Eigen::MatrixXcd &covariance, std::span<const double> lattice, Manifold &&manifold)
{
    if (lattice.empty())
        throw ScenarioError("music: empty search lattice");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(covariance);
    // ascending eigenvalues; model order one leaves n - 1 noise vectors
    const Eigen::Index n = covariance.rows();
    const Eigen::MatrixXcd noise = es.eigenvectors().leftCols(n - 1);

    MusicResult out;
    out.spectrum.resize(lattice.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < lattice.size(); ++i)
    {
        const Eigen::VectorXcd a = manifold(lattice[i]);
        const double denom = (noise.adjoint() * a).squaredNorm();
        out.spectrum[i] = 1.0 / std::max(denom, std::numeric_limits<double>::min());
        if (out.spectrum[i] > out.spectrum[best])
            best = i;
    }
    out.estimate = lattice[best];

    std::vector<double> sorted = out.spectrum;
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    out.significant_peak = out.spectrum[best] > 10.0 * *mid;
    return out;
}

std::vector<double> uniform_lattice(double lo, double hi, double step)
{
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

} // namespace

double wrap_residual(double x, double window)
{
    return x - window * std::floor(x / window + 0.5);
}

double wrap_angle(double x)
{
    const double r = x - 2.0 * pi * std::floor(x / (2.0 * pi) + 0.5);
    return r <= -pi ? r + 2.0 * pi : r;
}

MusicResult music_aoa(const Eigen::MatrixXcd &obs, int num_antennas, double antenna_spacing, double wavelength,
                      std::span<const double> angle_lattice)
{
    if (num_antennas < 2)
        throw ScenarioError("music_aoa: at least 2 antennas are required");
    if (obs.rows() != num_antennas)
        throw ScenarioError("music_aoa: observation rows do not match the antenna count");
    if (obs.cols() < 1)
        throw ScenarioError("music_aoa: no snapshots");

    const Eigen::MatrixXcd cov = obs * obs.adjoint() / static_cast<double>(obs.cols());
    return music_scan(cov, angle_lattice, [&](double phi) {
        return steering_vector(phi, num_antennas, antenna_spacing, wavelength);
    });
}

MusicResult music_toa(const Eigen::MatrixXcd &obs, const WaveformSpectrum &waveform, double sampling_period,
                      const Eigen::VectorXcd &combiner, std::span<const double> delay_lattice, int subband_length)
{
    const auto ns = static_cast<int>(obs.cols());
    if (ns < 2)
        throw ScenarioError("music_toa: at least 2 frequency bins are required");
    if (waveform.size() != ns || combiner.size() != obs.rows())
        throw ScenarioError("music_toa: waveform/combiner size mismatch");
    const int len = subband_length > 0 ? subband_length : ns / 2;
    if (len < 2 || len > ns)
        throw ScenarioError("music_toa: sub-band length must lie in [2, N_s]");

    Eigen::VectorXcd y(ns);
    for (int k = 0; k < ns; ++k)
    {
        const Complex s = waveform.coefficients(k);
        if (std::abs(s) < 1e-12)
            throw ScenarioError("music_toa: waveform coefficient " + std::to_string(k) + " is numerically zero");
        y(k) = combiner.dot(obs.col(k)) / s;
    }

    const int snapshots = ns - len + 1;
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(len, len);
    for (int i = 0; i < snapshots; ++i)
        cov.noalias() += y.segment(i, len) * y.segment(i, len).adjoint();
    cov /= static_cast<double>(snapshots);

    const double base = 2.0 * pi / (ns * sampling_period);
    const double norm = 1.0 / std::sqrt(static_cast<double>(len));
    return music_scan(cov, delay_lattice, [&](double tau) {
        Eigen::VectorXcd a(len);
        for (int l = 0; l < len; ++l)
            a(l) = std::polar(norm, -base * l * tau);
        return a;
    });
}

TransmitTimeFit eliminate_transmit_time(std::span<const double> offsets, std::span<const double> weights,
                                        double window)
{
    if (offsets.size() != weights.size())
        throw ScenarioError("eliminate_transmit_time: size mismatch");
    if (!(window > 0.0))
        throw ScenarioError("eliminate_transmit_time: window must be positive");

    std::vector<double> e;
    std::vector<double> w;
    for (std::size_t i = 0; i < offsets.size(); ++i)
    {
        if (weights[i] < 0.0 || !std::isfinite(weights[i]))
            throw ScenarioError("eliminate_transmit_time: weights must be finite and non-negative");
        if (weights[i] == 0.0)
            continue;
        double r = std::fmod(offsets[i], window);
        if (r < 0.0)
            r += window;
        e.push_back(r);
        w.push_back(weights[i]);
    }
    if (e.empty())
        return {};

    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });

    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    auto cost_at = [&](double t) {
        double c = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
        {
            const double r = wrap_residual(e[i] - t, window);
            c += w[i] * r * r;
        }
        return c;
    };

    // The optimum unwraps the residuals into one cyclic arrangement of the
    // sorted offsets, and is that arrangement's weighted mean.
    TransmitTimeFit best{0.0, std::numeric_limits<double>::infinity()};
    const std::size_t n = e.size();
    for (std::size_t cut = 0; cut < n; ++cut)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t idx = order[(cut + i) % n];
            acc += w[idx] * (e[idx] + (cut + i >= n ? window : 0.0));
        }
        double t = std::fmod(acc / wsum, window);
        if (t < 0.0)
            t += window;
        const double c = cost_at(t);
        if (c < best.cost)
            best = {t, c};
    }
    return best;
}

TransmitTimeFit fusion_cost(const MeasurementSet &meas, const Scenario &scn, const Position &p,
                            const FusionOptions &options)
{
    const std::size_t nru = meas.ru.size();
    TransmitTimeFit fit;
    if (options.use_toa)
    {
        std::vector<double> offsets(nru), weights(nru);
        for (std::size_t j = 0; j < nru; ++j)
        {
            offsets[j] = meas.ru[j].toa - propagation_delay(p, scn.radio_units[j].position, scn.propagation_speed);
            weights[j] = 1.0 / meas.ru[j].toa_var;
        }
        fit = eliminate_transmit_time(offsets, weights, scn.window());
    }
    if (options.use_aoa)
    {
        for (std::size_t j = 0; j < nru; ++j)
        {
            const double inv_var = 1.0 / meas.ru[j].aoa_var;
            if (inv_var == 0.0)
                continue;
            const auto &pj = scn.radio_units[j].position;
            if (p == pj)
                continue;
            const double r = wrap_angle(meas.ru[j].aoa - bearing(p, pj));
            fit.cost += r * r * inv_var;
        }
    }
    return fit;
}

Estimate fuse_ml(const MeasurementSet &meas, const Scenario &scn, const SearchGrid &grid,
                 const FusionOptions &options)
{
    if (meas.ru.size() < 2)
        throw ScenarioError("fuse_ml: at least 2 radio-unit measurements are required");
    if (meas.ru.size() != scn.num_radio_units())
        throw ScenarioError("fuse_ml: measurement count does not match radio units");
    if (!options.use_toa && !options.use_aoa)
        throw ScenarioError("fuse_ml: at least one of TOA and AOA must be used");
    for (const auto &m : meas.ru)
        if (!(m.toa_var > 0.0) || !(m.aoa_var > 0.0))
            throw ScenarioError("fuse_ml: measurement variances must be positive");

    const LatticeMaximum best = maximize_over_lattice(scn.region, grid, [&](const Position &p) {
        return -fusion_cost(meas, scn, p, options).cost;
    });
    Estimate est;
    est.position = best.position;
    est.objective = best.score;
    est.t0 = options.use_toa ? fusion_cost(meas, scn, best.position, options).t0 : 0.0;
    return est;
}

std::vector<double> aoa_lattice_for(const Scenario &scn, std::size_t j, double resolution)
{
    if (!(resolution > 0.0))
        throw ScenarioError("aoa_lattice_for: resolution must be positive");
    const auto &ru = scn.radio_units.at(j);
    const Region &a = scn.region;
    const Position centre{(a.x_min + a.x_max) / 2.0, (a.y_min + a.y_max) / 2.0};
    if (a.contains(ru.position) || centre == ru.position)
        return uniform_lattice(0.0, pi, resolution);

    const double c = bearing(centre, ru.position);
    double spread = 0.0;
    for (const Position &corner : {Position{a.x_min, a.y_min}, Position{a.x_max, a.y_min},
                                   Position{a.x_min, a.y_max}, Position{a.x_max, a.y_max}})
        if (!(corner == ru.position))
            spread = std::max(spread, std::abs(wrap_angle(bearing(corner, ru.position) - c)));
    spread += 0.05;

    double lo = c - spread;
    double hi = c + spread;
    if (c >= 0.0)
    {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, pi);
    }
    else
    {
        lo = std::max(lo, -pi);
        hi = std::min(hi, 0.0);
    }
    return uniform_lattice(lo, hi, resolution);
}

MeasurementSet measure_indirect(const Scenario &scn, const FreqObservation &obs, const IndirectOptions &options)
{
    if (obs.ru.size() != scn.num_radio_units())
        throw ScenarioError("measure_indirect: observation count does not match radio units");
    if (options.delay_oversampling < 1)
        throw ScenarioError("measure_indirect: delay oversampling must be >= 1");

    const double delay_step = scn.sampling_period / options.delay_oversampling;
    std::vector<double> delays = uniform_lattice(0.0, scn.window() - delay_step, delay_step);

    MeasurementSet meas;
    meas.ru.reserve(scn.num_radio_units());
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
    {
        const auto &ru = scn.radio_units[j];
        const std::vector<double> angles = aoa_lattice_for(scn, j, options.angle_resolution);
        const MusicResult aoa = music_aoa(obs.ru[j], ru.num_antennas, scn.antenna_spacing, scn.wavelength, angles);
        const Eigen::VectorXcd combiner =
            steering_vector(aoa.estimate, ru.num_antennas, scn.antenna_spacing, scn.wavelength);
        const MusicResult toa =
            music_toa(obs.ru[j], scn.waveform, scn.sampling_period, combiner, delays, options.subband_length);

        RuParameters at{toa.estimate, aoa.estimate, Complex(std::sqrt(ru.mean_channel_power), 0.0), 0.0};
        const Eigen::Matrix2d crb = delay_angle_crb(fim_unquantized(scn, j, at));

        RuMeasurement m;
        m.toa = toa.estimate;
        m.aoa = aoa.estimate;
        m.toa_var = crb(0, 0) + delay_step * delay_step / 12.0;
        m.aoa_var = crb(1, 1) + options.angle_resolution * options.angle_resolution / 12.0;
        meas.ru.push_back(m);
    }
    return meas;
}

Estimate estimate_indirect(const Scenario &scn, const FreqObservation &obs, const IndirectOptions &options)
{
    return fuse_ml(measure_indirect(scn, obs, options), scn, options.grid, options.fusion);
}

} // namespace cranloc
