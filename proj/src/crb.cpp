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

#include "cranloc/crb.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace cranloc
{

namespace
{
constexpr double pi = std::numbers::pi;
constexpr double min_cell_probability = 1e-300;
constexpr double max_condition = 1e12;

// Gaussian-kernel value exp(-(t - f)^2 / sigma^2); zero at infinite thresholds.
double kernel(double threshold, double mean, double sigma)
{
    if (std::isinf(threshold))
        return 0.0;
    const double u = (threshold - mean) / sigma;
    return std::exp(-u * u);
}

// sum_l (Gamma_l - Gamma_{l-1})^2 / P_l for one real component.
double quantized_score_weight(double mean, double sigma, const UniformQuantizerSpec &q)
{
    const double s = sigma / std::numbers::sqrt2;
    double sum = 0.0;
    double lower_threshold = q.threshold(0);
    double lower_kernel = 0.0;
    for (int l = 1; l <= q.levels; ++l)
    {
        const double upper_threshold = q.threshold(l);
        const double upper_kernel = kernel(upper_threshold, mean, sigma);
        const double p = normal_interval_probability((lower_threshold - mean) / s, (upper_threshold - mean) / s);
        if (p >= min_cell_probability)
        {
            const double dg = upper_kernel - lower_kernel;
            sum += dg * dg / p;
        }
        lower_threshold = upper_threshold;
        lower_kernel = upper_kernel;
    }
    return sum;
}

Eigen::Matrix<double, 2, 4> position_jacobian(double phi, double dist, double speed)
{
    Eigen::Matrix<double, 2, 4> u = Eigen::Matrix<double, 2, 4>::Zero();
    u(0, 0) = std::cos(phi) / speed;
    u(0, 1) = -std::sin(phi) / dist;
    u(1, 0) = std::sin(phi) / speed;
    u(1, 1) = std::cos(phi) / dist;
    return u;
}

void check_unit(const Scenario &scn, std::size_t j)
{
    if (j >= scn.num_radio_units())
        throw ScenarioError("crb: radio unit index " + std::to_string(j) + " out of range");
}

} // namespace

RuParameters ru_parameters(const Scenario &scn, std::size_t j, const ParamVector &theta)
{
    check_unit(scn, j);
    if (theta.b.size() != scn.num_radio_units())
        throw ScenarioError("ru_parameters: gain count does not match radio units");
    const auto &ru = scn.radio_units[j];
    return {propagation_delay(theta.p, ru.position, scn.propagation_speed), bearing(theta.p, ru.position),
            theta.b[j], theta.t0};
}

double standard_normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_interval_probability(double a, double b)
{
    if (!(b > a))
        return 0.0;
    constexpr double r = 1.0 / std::numbers::sqrt2;
    if (a >= 0.0)
        return 0.5 * (std::erfc(a * r) - std::erfc(b * r));
    if (b <= 0.0)
        return 0.5 * (std::erfc(-b * r) - std::erfc(-a * r));
    return 1.0 - 0.5 * std::erfc(-a * r) - 0.5 * std::erfc(b * r);
}

double cell_probability(int l, double mean, double sigma, const UniformQuantizerSpec &q)
{
    if (l < 1 || l > q.levels)
        throw ScenarioError("cell_probability: level index out of range");
    const double s = sigma / std::numbers::sqrt2;
    return normal_interval_probability((q.threshold(l - 1) - mean) / s, (q.threshold(l) - mean) / s);
}

Complex noiseless_mean(const Scenario &scn, std::size_t j, const RuParameters &theta, int k, int m)
{
    check_unit(scn, j);
    const auto &ru = scn.radio_units[j];
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(ru.num_antennas));
    const double array_phase = -2.0 * pi * m * scn.antenna_spacing * std::cos(theta.phi) / scn.wavelength;
    const double delay_phase = -scn.bin_frequency(k) * (theta.tau + theta.t0);
    return theta.b * scn.waveform.coefficients(k) * std::polar(inv_sqrt_m, array_phase + delay_phase);
}

Eigen::Matrix<double, 4, 2> mean_derivatives(const Scenario &scn, std::size_t j, int k, int m,
                                             const RuParameters &theta)
{
    RuParameters unit_gain = theta;
    unit_gain.b = Complex(1.0, 0.0);
    const Complex g = noiseless_mean(scn, j, unit_gain, k, m); // df/d(Re b)
    const Complex f = theta.b * g;
    const Complex i(0.0, 1.0);

    const Complex d_tau = -i * scn.bin_frequency(k) * f;
    const Complex d_phi = i * 2.0 * pi * scn.antenna_spacing * std::sin(theta.phi) * static_cast<double>(m) * f / scn.wavelength;
    const Complex d_im = i * g;

    Eigen::Matrix<double, 4, 2> d;
    d << d_tau.real(), d_tau.imag(),
         d_phi.real(), d_phi.imag(),
         g.real(), g.imag(),
         d_im.real(), d_im.imag();
    return d;
}

Fim4 fim_quantized(const Scenario &scn, std::size_t j, const RuParameters &theta, const UniformQuantizerSpec &q)
{
    check_unit(scn, j);
    const auto &ru = scn.radio_units[j];
    const double sigma = std::sqrt(ru.noise_power);
    Fim4 psi = Fim4::Zero();
    for (int k = 0; k < scn.num_samples; ++k)
        for (int m = 0; m < ru.num_antennas; ++m)
        {
            const Complex f = noiseless_mean(scn, j, theta, k, m);
            const auto d = mean_derivatives(scn, j, k, m, theta);
            const double w_re = quantized_score_weight(f.real(), sigma, q);
            const double w_im = quantized_score_weight(f.imag(), sigma, q);
            psi.noalias() += (w_re / (pi * ru.noise_power)) * d.col(0) * d.col(0).transpose();
            psi.noalias() += (w_im / (pi * ru.noise_power)) * d.col(1) * d.col(1).transpose();
        }
    return psi;
}

Fim4 fim_unquantized(const Scenario &scn, std::size_t j, const RuParameters &theta)
{
    check_unit(scn, j);
    const auto &ru = scn.radio_units[j];
    Fim4 psi = Fim4::Zero();
    for (int k = 0; k < scn.num_samples; ++k)
        for (int m = 0; m < ru.num_antennas; ++m)
        {
            const auto d = mean_derivatives(scn, j, k, m, theta);
            psi.noalias() += d * d.transpose();
        }
    return psi * (2.0 / ru.noise_power);
}

Efim2 efim(const Scenario &scn, const Position &p, std::span<const Fim4> psis)
{
    const std::size_t nru = scn.num_radio_units();
    if (psis.size() != nru)
        throw ScenarioError("efim: one Fisher matrix per radio unit is required");

    Eigen::Matrix<double, 2, 4> v = Eigen::Matrix<double, 2, 4>::Zero();
    v(0, 2) = 1.0;
    v(1, 3) = 1.0;

    Efim2 out;
    out.X.setZero();
    out.Y = Eigen::MatrixXd::Zero(2, 2 * static_cast<Eigen::Index>(nru));
    out.Z = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(nru), 2 * static_cast<Eigen::Index>(nru));
    for (std::size_t j = 0; j < nru; ++j)
    {
        const auto &ru = scn.radio_units[j];
        const double d = distance(p, ru.position);
        if (!(d > 0.0))
            throw CrbError("efim: source coincides with radio unit " + std::to_string(j));
        const auto u = position_jacobian(bearing(p, ru.position), d, scn.propagation_speed);
        const auto idx = 2 * static_cast<Eigen::Index>(j);
        out.X.noalias() += u * psis[j] * u.transpose();
        out.Y.middleCols(idx, 2).noalias() = u * psis[j] * v.transpose();
        out.Z.block(idx, idx, 2, 2).noalias() = v * psis[j] * v.transpose();
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.Z, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > max_condition)
        throw CrbError("efim: nuisance information Z is singular or ill-conditioned");

    out.J = out.X - out.Y * out.Z.ldlt().solve(out.Y.transpose());
    out.J = 0.5 * (out.J + out.J.transpose()).eval();
    return out;
}

double crb_trace(const Eigen::Matrix2d &J)
{
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(J, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(1);
    if (!(lo > 0.0) || hi / lo > max_condition)
        throw CrbError("crb_trace: position information is singular");
    return 1.0 / lo + 1.0 / hi;
}

double quantization_loss(int levels, double r_max, double sigma)
{
    const UniformQuantizerSpec q = make_quantizer(r_max, levels);
    if (!(sigma > 0.0))
        throw ScenarioError("quantization_loss: sigma must be positive");
    return quantized_score_weight(0.0, sigma, q) / (2.0 * pi);
}

CrbPair position_crbs(const Scenario &scn, const ParamVector &theta)
{
    const std::size_t nru = scn.num_radio_units();
    std::vector<Fim4> psi_q(nru), psi_u(nru);
    for (std::size_t j = 0; j < nru; ++j)
    {
        const RuParameters t = ru_parameters(scn, j, theta);
        psi_q[j] = fim_quantized(scn, j, t, quantizer_for(scn.radio_units[j]));
        psi_u[j] = fim_unquantized(scn, j, t);
    }
    CrbPair out;
    out.quantized = crb_trace(efim(scn, theta.p, psi_q).J);
    out.unquantized = crb_trace(efim(scn, theta.p, psi_u).J);
    return out;
}

double loss_ratio(const Scenario &scn, const ParamVector &theta)
{
    return position_crbs(scn, theta).ratio();
}

Eigen::Matrix2d delay_angle_crb(const Fim4 &psi)
{
    const Eigen::SelfAdjointEigenSolver<Fim4> es(psi);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e15)
        throw CrbError("delay_angle_crb: single-unit information is singular");
    const Fim4 inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return inv.topLeftCorner<2, 2>();
}

double convergence_dynamic_range(const Scenario &scn, std::size_t j, const RuParameters &theta)
{
    check_unit(scn, j);
    const auto &ru = scn.radio_units[j];
    double peak = 0.0;
    for (int k = 0; k < scn.num_samples; ++k)
        for (int m = 0; m < ru.num_antennas; ++m)
            peak = std::max(peak, std::abs(noiseless_mean(scn, j, theta, k, m)));
    return 4.0 * (peak + std::sqrt(ru.noise_power));
}

std::vector<ConvergencePoint> convergence_sweep(const Scenario &scn, std::size_t j, const RuParameters &theta,
                                                std::span<const int> level_schedule, double r_max)
{
    for (std::size_t i = 1; i < level_schedule.size(); ++i)
        if (level_schedule[i] <= level_schedule[i - 1])
            throw ScenarioError("convergence_sweep: level schedule must be increasing");

    const Fim4 reference = fim_unquantized(scn, j, theta);
    const double ref_norm = reference.norm();
    std::vector<ConvergencePoint> out;
    out.reserve(level_schedule.size());
    for (const int levels : level_schedule)
    {
        const Fim4 psi = fim_quantized(scn, j, theta, make_quantizer(r_max, levels));
        const double dist = (psi - reference).norm();
        out.push_back({levels, dist, ref_norm > 0.0 ? dist / ref_norm : 0.0});
    }
    return out;
}

} // namespace cranloc
