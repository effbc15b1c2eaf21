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

#include <vector>

#include "cranloc/fronthaul.hpp"
#include "cranloc/scenario.hpp"
#include "cranloc/search_grid.hpp"

namespace cranloc
{

/// Localizer output. `objective` is the maximized score (direct) or the
/// negated residual (indirect fusion).
struct Estimate
{
    Position position;
    double t0 = 0.0;
    std::vector<Complex> amplitudes;
    double objective = 0.0;
};

/// Per-bin template S(k) exp(-i w_k tau_j(p)) / gamma_j(k), evaluated at t0 = 0.
Eigen::VectorXcd weighted_template(const Scenario &scn, std::size_t j, const Position &p,
                                   const EffectiveWeights &weights);

/// N_s x N_r matrix V(p). Column j, row k:
///   conj(S(k)) exp(i w_k tau_j(p)) alpha_j(p)^H R_j(k) / (gamma_j^2(k) ||template_j||).
Eigen::MatrixXcd candidate_matrix(const Scenario &scn, const FreqObservation &obs, const Position &p,
                                  const EffectiveWeights &weights);

/// sum_j |F V_j|^2 with F the forward (q N_s)-point DFT on zero-padded columns.
/// Bin k corresponds to t0 = ((-k) mod q N_s) T_s / q, see t0_for_bin().
Eigen::VectorXd fft_t0_scores(const Eigen::MatrixXcd &candidates, int t0_oversampling);

double t0_for_bin(const Scenario &scn, int bin, int t0_oversampling);

/// Closed-form weighted least-squares channel coefficient for radio unit j at (p, t0).
Complex estimate_amplitude(const Scenario &scn, const FreqObservation &obs, std::size_t j, const Position &p,
                           double t0, const EffectiveWeights &weights);

/// Approximate-ML position: lattice + zoom over p, FFT grid over t0.
Estimate estimate_position(const Scenario &scn, const FreqObservation &obs, const EffectiveWeights &weights,
                           const SearchGrid &grid);

} // namespace cranloc
