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

#include "cranloc/direct_localizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace cranloc
{

namespace
{

void check_inputs(const Scenario &scn, const FreqObservation &obs, const EffectiveWeights &weights)
{
    const std::size_t nru = scn.num_radio_units();
    if (obs.ru.size() != nru || weights.gamma2.size() != nru)
        throw ScenarioError("direct localizer: observation/weight count does not match radio units");
    for (std::size_t j = 0; j < nru; ++j)
    {
        if (obs.ru[j].rows() != scn.radio_units[j].num_antennas || obs.ru[j].cols() != scn.num_samples)
            throw ScenarioError("direct localizer: observation " + std::to_string(j) + " has the wrong shape");
        if (weights.gamma2[j].size() != scn.num_samples)
            throw ScenarioError("direct localizer: weight vector " + std::to_string(j) + " has the wrong length");
    }
}

// Evaluates the columns of V(p) with per-call precomputation.
class CandidateEvaluator
{
public:
    CandidateEvaluator(const Scenario &scn, const FreqObservation &obs, const EffectiveWeights &weights)
        : scn_(scn), obs_(obs), factor_(scn.num_radio_units())
    {
        check_inputs(scn, obs, weights);
        for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
        {
            const Eigen::VectorXd &g2 = weights.gamma2[j];
            const double norm2 = (scn.waveform.coefficients.cwiseAbs2().array() / g2.array()).sum();
            if (!(norm2 > 0.0))
                throw ScenarioError("direct localizer: zero template norm for radio unit " + std::to_string(j));
            factor_[j] = scn.waveform.coefficients.conjugate().array() / (g2.array() * std::sqrt(norm2));
        }
    }

    // Writes column j of V(p) into out[0..N_s).
    void column(std::size_t j, const Position &p, Complex *out) const
    {
        const auto &ru = scn_.radio_units[j];
        const auto &r = obs_.ru[j];
        const int M = ru.num_antennas;
        const int N = scn_.num_samples;

        const double tau = propagation_delay(p, ru.position, scn_.propagation_speed);
        const double cos_phi = p == ru.position ? 1.0 : std::cos(bearing(p, ru.position));
        // conj(alpha_m) = exp(+i 2 pi m spacing cos(phi) / lambda) / sqrt(M)
        const Complex a_step = std::polar(1.0, 2.0 * std::numbers::pi * scn_.antenna_spacing * cos_phi / scn_.wavelength);
        const Complex w_step = std::polar(1.0, scn_.bin_frequency(1) * tau);
        const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));

        Complex shift(1.0, 0.0);
        for (int k = 0; k < N; ++k)
        {
            Complex acc(0.0, 0.0);
            Complex a(inv_sqrt_m, 0.0);
            for (int m = 0; m < M; ++m)
            {
                acc += a * r(m, k);
                a *= a_step;
            }
            out[k] = factor_[j](k) * shift * acc;
            shift *= w_step;
        }
    }

private:
    const Scenario &scn_;
    const FreqObservation &obs_;
    std::vector<Eigen::VectorXcd> factor_; // conj(S(k)) / (gamma^2(k) ||template||)
};

} // namespace

Eigen::VectorXcd weighted_template(const Scenario &scn, std::size_t j, const Position &p,
                                   const EffectiveWeights &weights)
{
    if (j >= scn.num_radio_units() || j >= weights.gamma2.size())
        throw ScenarioError("weighted_template: radio unit index out of range");
    const double tau = propagation_delay(p, scn.radio_units[j].position, scn.propagation_speed);
    Eigen::VectorXcd t(scn.num_samples);
    for (int k = 0; k < scn.num_samples; ++k)
        t(k) = scn.waveform.coefficients(k) * std::polar(1.0, -scn.bin_frequency(k) * tau) /
               std::sqrt(weights.gamma2[j](k));
    return t;
}

Eigen::MatrixXcd candidate_matrix(const Scenario &scn, const FreqObservation &obs, const Position &p,
                                  const EffectiveWeights &weights)
{
    const CandidateEvaluator eval(scn, obs, weights);
    Eigen::MatrixXcd v(scn.num_samples, static_cast<Eigen::Index>(scn.num_radio_units()));
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
        eval.column(j, p, v.col(static_cast<Eigen::Index>(j)).data());
    return v;
}

Eigen::VectorXd fft_t0_scores(const Eigen::MatrixXcd &candidates, int t0_oversampling)
{
    if (t0_oversampling < 1)
        throw ScenarioError("fft_t0_scores: t0 oversampling must be >= 1");
    const auto n = static_cast<int>(candidates.rows()) * t0_oversampling;
    const auto cols = static_cast<int>(candidates.cols());
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(n, cols);
    padded.topRows(candidates.rows()) = candidates;
    Eigen::MatrixXcd spectrum(n, cols);
    if (n > 0 && cols > 0)
        detail::BatchedFft(n, cols).forward(padded.data(), spectrum.data());
    return spectrum.cwiseAbs2().rowwise().sum();
}

double t0_for_bin(const Scenario &scn, int bin, int t0_oversampling)
{
    const int n = scn.num_samples * t0_oversampling;
    const int wrapped = ((-bin) % n + n) % n;
    return wrapped * scn.sampling_period / t0_oversampling;
}

Complex estimate_amplitude(const Scenario &scn, const FreqObservation &obs, std::size_t j, const Position &p,
                           double t0, const EffectiveWeights &weights)
{
    check_inputs(scn, obs, weights);
    if (j >= scn.num_radio_units())
        throw ScenarioError("estimate_amplitude: radio unit index out of range");
    const auto &ru = scn.radio_units[j];
    const Eigen::VectorXd &g2 = weights.gamma2[j];
    const double norm2 = (scn.waveform.coefficients.cwiseAbs2().array() / g2.array()).sum();
    if (!(norm2 > 0.0))
        throw ScenarioError("estimate_amplitude: zero template norm");

    const double tau = propagation_delay(p, ru.position, scn.propagation_speed);
    const double phi = p == ru.position ? 0.0 : bearing(p, ru.position);
    const Eigen::VectorXcd alpha = steering_vector(phi, ru.num_antennas, scn.antenna_spacing, scn.wavelength);
    Complex acc(0.0, 0.0);
    for (int k = 0; k < scn.num_samples; ++k)
    {
        const Complex beam = alpha.dot(obs.ru[j].col(k)); // alpha^H R(k)
        acc += std::conj(scn.waveform.coefficients(k)) * std::polar(1.0, scn.bin_frequency(k) * (tau + t0)) * beam /
               g2(k);
    }
    return acc / norm2;
}

Estimate estimate_position(const Scenario &scn, const FreqObservation &obs, const EffectiveWeights &weights,
                           const SearchGrid &grid)
{
    grid.validate();
    const CandidateEvaluator eval(scn, obs, weights);
    const int nru = static_cast<int>(scn.num_radio_units());
    const int n = scn.num_samples * grid.t0_oversampling;
    const detail::BatchedFft fft(n, nru);

    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(n, nru);
    Eigen::MatrixXcd spectrum(n, nru);
    Eigen::VectorXd scores(n);
    int best_bin = 0;

    auto score_at = [&](const Position &p, int *bin) {
        for (int j = 0; j < nru; ++j)
            eval.column(static_cast<std::size_t>(j), p, padded.col(j).data());
        fft.forward(padded.data(), spectrum.data());
        scores = spectrum.cwiseAbs2().rowwise().sum();
        Eigen::Index arg = 0;
        const double best = scores.maxCoeff(&arg);
        if (bin)
            *bin = static_cast<int>(arg);
        return best;
    };

    const LatticeMaximum best = maximize_over_lattice(scn.region, grid, [&](const Position &p) {
        return score_at(p, nullptr);
    });
    const double objective = score_at(best.position, &best_bin);

    Estimate est;
    est.position = best.position;
    est.t0 = t0_for_bin(scn, best_bin, grid.t0_oversampling);
    est.objective = objective;
    est.amplitudes.reserve(scn.num_radio_units());
    for (std::size_t j = 0; j < scn.num_radio_units(); ++j)
        est.amplitudes.push_back(estimate_amplitude(scn, obs, j, est.position, est.t0, weights));
    return est;
}

} // namespace cranloc
