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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cranloc/config.hpp"

namespace cranloc
{

struct TrialRecord
{
    std::size_t trial = 0;
    Method method = Method::DirectIdeal;
    double snr_db = 0.0;
    double b_over_m = 0.0;
    double dither_divisor = 0.0; // 0 unless the method dithers
    Position p_true;
    Position p_hat;
    double sq_error = 0.0; // ||p_hat - p_true||^2
    std::uint64_t seed = 0;
};

struct RmsSummary
{
    Method method = Method::DirectIdeal;
    double snr_db = 0.0;
    double b_over_m = 0.0;
    double dither_divisor = 0.0;
    double rms = 0.0; // sqrt(mean sq_error)
    std::size_t trials = 0;
    double rms_stderr = 0.0; // delta-method standard error of the RMS
};

struct ExperimentResult
{
    ExperimentConfig config; // resolved, with calibrated ranges
    std::vector<TrialRecord> trials;
    std::vector<RmsSummary> summaries;
};

/// Calibrated per-RU dynamic ranges for every SNR of the sweep (and the CRB sweep
/// when `include_crb`), reusing any already present in the config.
CalibrationConfig calibrate(const ExperimentConfig &cfg, bool include_crb = false);

/// Monte Carlo sweep over (method, SNR, B/M) cells. Channel and noise draws depend
/// only on (seed, SNR, trial), so every method and rate sees the same realizations.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

RmsSummary summarize(std::span<const TrialRecord> records);

/// Records of one sweep cell in trial order.
std::vector<TrialRecord> select_cell(const ExperimentResult &result, Method method, double snr_db, double b_over_m,
                                     double dither_divisor = 0.0);

struct PairedDifference
{
    double rms_a = 0.0;
    double rms_b = 0.0;
    double difference = 0.0;     // rms_a - rms_b
    double standard_error = 0.0; // paired delta-method standard error of the difference

    /// Fractional RMS reduction of b relative to a.
    double relative_gain() const { return rms_a > 0.0 ? difference / rms_a : 0.0; }
};

/// RMS(a) - RMS(b) on trial-paired records with its paired standard error.
PairedDifference paired_rms_difference(std::span<const TrialRecord> a, std::span<const TrialRecord> b);

struct CrbRow
{
    double snr_db = 0.0;
    double b_over_m = 0.0;
    int levels = 0;
    double r_max = 0.0;
    double crb_quantized = 0.0;   // mean over positions, m^2
    double crb_unquantized = 0.0; // mean over positions, m^2
    double ratio = 0.0;           // crb_unquantized / crb_quantized
    double mean_pointwise_ratio = 0.0;
    double quantization_loss = 0.0;
    std::size_t positions = 0;
    std::size_t skipped = 0;
};

/// CRB^UQ / CRB^Q against L_Q with an equal fronthaul rate and one shared quantizer.
std::vector<CrbRow> crb_sweep(const ExperimentConfig &cfg);

/// Writes trials.csv, summary.csv and config.json into `dir` (created if missing).
void emit_results(const ExperimentResult &result, const std::filesystem::path &dir);

/// Writes crb.csv and config.json into `dir`.
void emit_crb(const std::vector<CrbRow> &rows, const ExperimentConfig &cfg, const std::filesystem::path &dir);

} // namespace cranloc
