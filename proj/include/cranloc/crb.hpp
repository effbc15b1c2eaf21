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
#include <stdexcept>
#include <vector>

#include "cranloc/fronthaul.hpp"
#include "cranloc/scenario.hpp"

namespace cranloc
{

/// Numerical failure in a bound computation (singular or ill-conditioned information).
class CrbError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Full parameter vector: position, one complex gain per radio unit, and the
/// transmit time, which is treated as known when bounding the position error.
struct ParamVector
{
    Position p;
    std::vector<Complex> b;
    double t0 = 0.0;
};

/// Per-RU reparameterization [tau_j, phi_j, Re b_j, Im b_j] with known t0.
struct RuParameters
{
    double tau = 0.0;
    double phi = 0.0;
    Complex b;
    double t0 = 0.0;
};

using Fim4 = Eigen::Matrix4d;

/// Equivalent Fisher information of the position, J = X - Y Z^{-1} Y^T.
struct Efim2
{
    Eigen::Matrix2d J;
    Eigen::Matrix2d X;
    Eigen::MatrixXd Y; // 2 x 2 N_r
    Eigen::MatrixXd Z; // 2 N_r x 2 N_r, block diagonal
};

RuParameters ru_parameters(const Scenario &scn, std::size_t j, const ParamVector &theta);

double standard_normal_cdf(double x);

/// P(a < X <= b) for X ~ N(0, 1), accurate in both tails.
double normal_interval_probability(double a, double b);

/// Probability that one real component with mean `mean` and variance sigma^2 / 2
/// falls into quantizer cell l. `sigma` is the per-complex-sample standard deviation.
double cell_probability(int l, double mean, double sigma, const UniformQuantizerSpec &q);

/// f_{j,k,m} = b [alpha_j]_m S(k) exp(-i w_k (tau + t0)); m, k are 0-based.
Complex noiseless_mean(const Scenario &scn, std::size_t j, const RuParameters &theta, int k, int m);

/// Rows: tau, phi, Re b, Im b. Columns: derivative of Re f and Im f.
Eigen::Matrix<double, 4, 2> mean_derivatives(const Scenario &scn, std::size_t j, int k, int m,
                                             const RuParameters &theta);

/// Fisher information of the quantized (undithered) observations of radio unit j.
Fim4 fim_quantized(const Scenario &scn, std::size_t j, const RuParameters &theta, const UniformQuantizerSpec &q);

/// Fisher information of the unquantized observations of radio unit j.
Fim4 fim_unquantized(const Scenario &scn, std::size_t j, const RuParameters &theta);

/// Nuisance-eliminated position information. Throws CrbError when Z has condition number above 1e12.
Efim2 efim(const Scenario &scn, const Position &p, std::span<const Fim4> psis);

/// tr J^{-1}, the bound on the mean squared position error in m^2.
double crb_trace(const Eigen::Matrix2d &J);

/// Low-SNR loss factor of the uniform quantizer (<= 1); equals 2/pi for one bit.
double quantization_loss(int levels, double r_max, double sigma);

struct CrbPair
{
    double quantized = 0.0;
    double unquantized = 0.0;

    double ratio() const { return unquantized / quantized; }
};

/// Both position bounds at theta; quantizers come from the radio units' calibrated ranges.
CrbPair position_crbs(const Scenario &scn, const ParamVector &theta);

/// CRB^UQ / CRB^Q at theta.
double loss_ratio(const Scenario &scn, const ParamVector &theta);

/// CRB of (tau, phi) from a single radio unit: the top-left block of Psi^{-1}.
Eigen::Matrix2d delay_angle_crb(const Fim4 &psi);

struct ConvergencePoint
{
    int levels = 0;
    double distance = 0.0; // ||Psi^Q - Psi^UQ||_F
    double relative = 0.0; // distance / ||Psi^UQ||_F
};

/// Default range for the convergence sweep: 4 (max |f| + sigma).
double convergence_dynamic_range(const Scenario &scn, std::size_t j, const RuParameters &theta);

/// Frobenius distance between quantized and unquantized information along a
/// level schedule at fixed dynamic range.
std::vector<ConvergencePoint> convergence_sweep(const Scenario &scn, std::size_t j, const RuParameters &theta,
                                                std::span<const int> level_schedule, double r_max);

} // namespace cranloc
