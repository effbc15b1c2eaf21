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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cranloc/experiment.hpp"

using namespace cranloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

/// Reference layout with a coarse lattice so a sweep runs in well under a second.
ExperimentConfig quick_config()
{
    ExperimentConfig cfg;
    cfg.snr_db = {5.0};
    cfg.b_over_m = {2.0, 6.0};
    cfg.trials = 6;
    cfg.seed = 99;
    cfg.grid.spacing = 150.0;
    cfg.grid.zoom_rounds = 1;
    cfg.indirect.grid = cfg.grid;
    cfg.indirect.delay_oversampling = 20;
    cfg.indirect.angle_resolution = 5e-3;
    return cfg;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / "cranloc_tests" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

TrialRecord record(std::size_t trial, double sq)
{
    TrialRecord r;
    r.trial = trial;
    r.sq_error = sq;
    return r;
}

} // namespace

TEST_CASE("RMS summary and its standard error", "[experiment]")
{
    std::vector<TrialRecord> recs{record(0, 1.0), record(1, 4.0), record(2, 9.0), record(3, 16.0)};
    const RmsSummary s = summarize(recs);
    CHECK(s.trials == 4);
    CHECK_THAT(s.rms, WithinRel(std::sqrt(7.5), 1e-15));
    // var of squared errors (n-1): (6.5^2 + 3.5^2 + 1.5^2 + 8.5^2) / 3 = 43
    CHECK_THAT(s.rms_stderr, WithinRel(std::sqrt(43.0 / 4.0) / (2.0 * std::sqrt(7.5)), 1e-12));
    CHECK(summarize(std::vector<TrialRecord>{}).trials == 0);
    CHECK(summarize(std::vector<TrialRecord>{record(0, 4.0)}).rms_stderr == 0.0);
}

TEST_CASE("paired RMS difference uses the joint delta method", "[experiment]")
{
    Rng rng(3);
    std::exponential_distribution<double> ex(1e-4);
    std::vector<TrialRecord> a, b;
    for (std::size_t n = 0; n < 400; ++n)
    {
        const double common = ex(rng);
        a.push_back(record(n, common + ex(rng)));
        b.push_back(record(n, 0.8 * common + 0.5 * ex(rng)));
    }
    const PairedDifference d = paired_rms_difference(a, b);

    // 2x2 covariance of the squared errors and the gradient of sqrt(ma) - sqrt(mb)
    const double n = 400.0;
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ma += a[i].sq_error / n;
        mb += b[i].sq_error / n;
    }
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        saa += (a[i].sq_error - ma) * (a[i].sq_error - ma) / (n - 1);
        sbb += (b[i].sq_error - mb) * (b[i].sq_error - mb) / (n - 1);
        sab += (a[i].sq_error - ma) * (b[i].sq_error - mb) / (n - 1);
    }
    const double ga = 0.5 / std::sqrt(ma), gb = -0.5 / std::sqrt(mb);
    const double se = std::sqrt((ga * ga * saa + gb * gb * sbb + 2 * ga * gb * sab) / n);
    CHECK_THAT(d.difference, WithinRel(std::sqrt(ma) - std::sqrt(mb), 1e-12));
    CHECK_THAT(d.standard_error, WithinRel(se, 1e-10));
    CHECK_THAT(d.relative_gain(), WithinRel(d.difference / d.rms_a, 1e-15));

    b.pop_back();
    CHECK_THROWS(paired_rms_difference(a, b));
    b.push_back(record(999, 1.0));
    CHECK_THROWS(paired_rms_difference(a, b));
}

TEST_CASE("experiment sweep layout and records", "[experiment]")
{
    const ExperimentConfig cfg = quick_config();
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.summaries.size() == cfg.methods.size() * cfg.snr_db.size() * cfg.b_over_m.size());
    CHECK(res.trials.size() == res.summaries.size() * static_cast<std::size_t>(cfg.trials));
    for (const auto &r : res.trials)
    {
        const double dx = r.p_hat.x - r.p_true.x, dy = r.p_hat.y - r.p_true.y;
        CHECK(r.sq_error == dx * dx + dy * dy);
        CHECK(cfg.scenario.region.contains(r.p_true));
        CHECK(cfg.scenario.region.contains(r.p_hat));
        CHECK((r.method == Method::DirectDithered) == (r.dither_divisor > 0.0));
    }
    for (const auto &s : res.summaries)
    {
        CHECK(s.rms >= 0.0);
        CHECK(s.trials == static_cast<std::size_t>(cfg.trials));
    }
    // the resolved config carries the calibration used
    CHECK(find_calibration(res.config.calibration, 5.0).has_value());

    // paired design: every method in a cell sees the same source position
    const auto q = select_cell(res, Method::DirectQuantized, 5.0, 2.0);
    const auto i = select_cell(res, Method::Indirect, 5.0, 6.0);
    REQUIRE(q.size() == i.size());
    for (std::size_t n = 0; n < q.size(); ++n)
    {
        CHECK(q[n].p_true == i[n].p_true);
        CHECK(q[n].seed == i[n].seed);
    }
}

TEST_CASE("experiments are reproducible across runs and thread counts", "[experiment]")
{
    ExperimentConfig cfg = quick_config();
    cfg.trials = 1;
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t n = 0; n < a.trials.size(); ++n)
    {
        CHECK(a.trials[n].p_hat == b.trials[n].p_hat);
        CHECK(a.trials[n].seed == b.trials[n].seed);
    }

    cfg.trials = 5;
    cfg.threads = 1;
    const auto d1 = scratch("det1");
    emit_results(run_experiment(cfg), d1);
    cfg.threads = 3;
    const auto d3 = scratch("det3");
    emit_results(run_experiment(cfg), d3);
    CHECK(slurp(d1 / "summary.csv") == slurp(d3 / "summary.csv"));
    CHECK(slurp(d1 / "trials.csv") == slurp(d3 / "trials.csv"));

    cfg.seed = 100;
    const auto other = scratch("det_other");
    emit_results(run_experiment(cfg), other);
    CHECK(slurp(d1 / "trials.csv") != slurp(other / "trials.csv"));
}

TEST_CASE("emitted files and config echo reproduce the run", "[experiment]")
{
    const ExperimentConfig cfg = quick_config();
    const auto dir = scratch("emit");
    const ExperimentResult res = run_experiment(cfg);
    emit_results(res, dir);
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("method,snr_db,b_over_m,dither_divisor,rms,trials,rms_stderr\n", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 1 + static_cast<long>(res.summaries.size()));
    const std::string trials = slurp(dir / "trials.csv");
    CHECK(std::count(trials.begin(), trials.end(), '\n') == 1 + static_cast<long>(res.trials.size()));

    // overwrite in place with identical content
    emit_results(res, dir);
    CHECK(slurp(dir / "summary.csv") == summary);

    // reloading the frozen config reproduces the results without recalibrating
    const ExperimentConfig frozen = load_config(dir / "config.json");
    const auto again = scratch("emit_again");
    emit_results(run_experiment(frozen), again);
    CHECK(slurp(again / "trials.csv") == trials);
    CHECK(slurp(again / "config.json") == slurp(dir / "config.json"));
}

TEST_CASE("ideal fronthaul at high SNR resolves below the lattice spacing", "[experiment]")
{
    ExperimentConfig cfg;
    cfg.snr_db = {30.0};
    cfg.b_over_m = {4.0};
    cfg.methods = {Method::DirectIdeal};
    cfg.trials = 100;
    cfg.seed = 5;
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.summaries.size() == 1);
    CHECK(res.summaries[0].rms < 25.0);
}

TEST_CASE("CRB sweep rows", "[experiment]")
{
    ExperimentConfig cfg;
    cfg.fronthaul_pattern = {1.0, 1.0, 1.0, 1.0};
    cfg.crb.snr_db = {-10.0, 10.0};
    cfg.crb.b_over_m = {2.0, 4.0, 12.0};
    cfg.crb.positions = 10;
    const auto rows = crb_sweep(cfg);
    REQUIRE(rows.size() == 6);
    for (const auto &r : rows)
    {
        CHECK(r.ratio <= 1.0);
        CHECK(r.ratio > 0.0);
        CHECK(r.positions + r.skipped == 10);
        CHECK(r.quantization_loss <= 1.0);
        CHECK(r.crb_quantized >= r.crb_unquantized);
    }
    CHECK(rows[0].levels == 2);
    CHECK_THAT(rows[0].quantization_loss, WithinAbs(2.0 / 3.141592653589793, 1e-12));
    // finer quantization loses less; the residual loss at 64 levels comes from clipping
    // the 5% of components outside the calibrated range
    for (std::size_t s0 : {0u, 3u})
    {
        CHECK(rows[s0].ratio < rows[s0 + 1].ratio);
        CHECK(rows[s0 + 1].ratio < rows[s0 + 2].ratio);
        CHECK(rows[s0 + 2].ratio > 0.98);
    }

    const auto dir = scratch("crb");
    emit_crb(rows, cfg, dir);
    const std::string csv = slurp(dir / "crb.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

    // the bound comparison always uses equal rates, whatever the sweep pattern
    cfg.fronthaul_pattern = {1.0, 1.0, 1.0, 2.0};
    const auto again = crb_sweep(cfg);
    REQUIRE(again.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(again[i].ratio == rows[i].ratio);
}

TEST_CASE("empty method list is a configuration error", "[experiment]")
{
    ExperimentConfig cfg = quick_config();
    cfg.methods.clear();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
