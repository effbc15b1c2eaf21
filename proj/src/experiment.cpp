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

#include "cranloc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "cranloc/crb.hpp"
#include "cranloc/direct_localizer.hpp"
#include "cranloc/fronthaul.hpp"
#include "cranloc/indirect_localizer.hpp"

namespace cranloc
{

namespace
{

// Stream tags for derive_seed.
constexpr std::uint64_t calibration_stream = 0xCA11B;
constexpr std::uint64_t trial_stream = 0x7121A1;
constexpr std::uint64_t dither_stream = 0xD17E;
constexpr std::uint64_t crb_stream = 0xC7B;

bool uses_quantizer(const ExperimentConfig &cfg)
{
    return std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
        return m == Method::DirectQuantized || m == Method::DirectDithered;
    });
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const std::size_t used = std::min(workers, n);
    for (std::size_t t = 0; t < used; ++t)
        pool.emplace_back([&, t] {
            try
            {
                for (std::size_t i = t; i < n; i += used)
                    fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

double squared_error(const Position &a, const Position &b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Per-trial estimates for one SNR; slots are indexed [b][divisor].
struct TrialOutcome
{
    std::uint64_t seed = 0;
    Position truth;
    Position ideal;
    Position indirect;
    std::vector<Position> quantized;
    std::vector<std::vector<Position>> dithered;
};

std::ofstream open_for_write(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void close_checked(std::ofstream &out, const std::filesystem::path &path)
{
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

void ensure_directory(const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

} // namespace

CalibrationConfig calibrate(const ExperimentConfig &cfg, bool include_crb)
{
    CalibrationConfig cal = cfg.calibration;
    std::vector<double> snrs = cfg.snr_db;
    if (include_crb)
        snrs.insert(snrs.end(), cfg.crb.snr_db.begin(), cfg.crb.snr_db.end());
    for (double snr : snrs)
    {
        if (find_calibration(cal, snr))
            continue;
        const Scenario scn = build_scenario(cfg.scenario, snr, cfg.b_over_m.front(), cfg.fronthaul_pattern);
        Rng rng(derive_seed(cfg.seed, {calibration_stream, seed_tag(snr)}));
        cal.r_max_by_snr[snr] = calibrate_dynamic_range(scn, cal.coverage, cal.draws, trial_t0_prior(cfg), rng);
    }
    return cal;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg_in)
{
    cfg_in.validate();
    ExperimentResult result;
    result.config = cfg_in;
    ExperimentConfig &cfg = result.config;
    cfg.indirect.grid = cfg.grid;
    if (uses_quantizer(cfg))
        cfg.calibration = calibrate(cfg);

    const bool want_ideal = std::count(cfg.methods.begin(), cfg.methods.end(), Method::DirectIdeal) > 0;
    const bool want_indirect = std::count(cfg.methods.begin(), cfg.methods.end(), Method::Indirect) > 0;
    const bool want_quantized = std::count(cfg.methods.begin(), cfg.methods.end(), Method::DirectQuantized) > 0;
    const bool want_dithered = std::count(cfg.methods.begin(), cfg.methods.end(), Method::DirectDithered) > 0;
    const std::size_t nb = cfg.b_over_m.size();
    const std::size_t nd = cfg.dither_divisors.size();
    const auto n_trials = static_cast<std::size_t>(cfg.trials);

    for (double snr : cfg.snr_db)
    {
        const std::vector<double> r_max = uses_quantizer(cfg) ? *find_calibration(cfg.calibration, snr)
                                                              : std::vector<double>{};
        std::vector<Scenario> cells;
        std::vector<std::vector<UniformQuantizerSpec>> quantizers(nb);
        std::vector<EffectiveWeights> weights;
        for (std::size_t b = 0; b < nb; ++b)
        {
            cells.push_back(build_scenario(cfg.scenario, snr, cfg.b_over_m[b], cfg.fronthaul_pattern, r_max));
            if (uses_quantizer(cfg))
                for (const auto &ru : cells.back().radio_units)
                    quantizers[b].push_back(quantizer_for(ru));
            weights.push_back(effective_weights(cells.back()));
        }
        const Scenario &base = cells.front();
        const EffectiveWeights ideal_weights = unquantized_weights(base);

        std::vector<TrialOutcome> outcomes(n_trials);
        parallel_for(n_trials, cfg.threads, [&](std::size_t n) {
            TrialOutcome &out = outcomes[n];
            out.seed = derive_seed(cfg.seed, {trial_stream, seed_tag(snr), n});
            Rng rng(out.seed);
            const ChannelDraw draw = draw_channel(base, trial_t0_prior(cfg), rng);
            const FreqObservation obs = synthesize_observation(base, draw, rng);
            out.truth = draw.source;

            if (want_ideal)
                out.ideal = estimate_position(base, obs, ideal_weights, cfg.grid).position;
            if (want_indirect)
                out.indirect = estimate_indirect(base, obs, cfg.indirect).position;

            out.quantized.resize(nb);
            out.dithered.assign(nb, std::vector<Position>(nd));
            for (std::size_t b = 0; b < nb; ++b)
            {
                if (want_quantized)
                {
                    Rng unused(0);
                    const FronthaulOutput fh = fronthaul_round_trip(obs, quantizers[b], DitherSpec{2.0, false}, unused);
                    out.quantized[b] = estimate_position(cells[b], fh.recovered, weights[b], cfg.grid).position;
                }
                if (want_dithered)
                    for (std::size_t d = 0; d < nd; ++d)
                    {
                        // same uniform draws for every divisor, scaled by step / divisor
                        Rng drng(derive_seed(cfg.seed, {dither_stream, seed_tag(snr), seed_tag(cfg.b_over_m[b]), n}));
                        const FronthaulOutput fh =
                            fronthaul_round_trip(obs, quantizers[b], DitherSpec{cfg.dither_divisors[d], true}, drng);
                        out.dithered[b][d] = estimate_position(cells[b], fh.recovered, weights[b], cfg.grid).position;
                    }
            }
        });

        auto emit_cell = [&](Method m, std::size_t b, double divisor, auto &&pick) {
            std::vector<TrialRecord> cell;
            cell.reserve(n_trials);
            for (std::size_t n = 0; n < n_trials; ++n)
            {
                const TrialOutcome &o = outcomes[n];
                TrialRecord r;
                r.trial = n;
                r.method = m;
                r.snr_db = snr;
                r.b_over_m = cfg.b_over_m[b];
                r.dither_divisor = divisor;
                r.p_true = o.truth;
                r.p_hat = pick(o);
                r.sq_error = squared_error(r.p_hat, r.p_true);
                r.seed = o.seed;
                cell.push_back(r);
            }
            result.summaries.push_back(summarize(cell));
            result.trials.insert(result.trials.end(), cell.begin(), cell.end());
        };

        for (std::size_t b = 0; b < nb; ++b)
            for (Method m : cfg.methods)
                switch (m)
                {
                case Method::DirectQuantized:
                    emit_cell(m, b, 0.0, [b](const TrialOutcome &o) { return o.quantized[b]; });
                    break;
                case Method::DirectDithered:
                    for (std::size_t d = 0; d < nd; ++d)
                        emit_cell(m, b, cfg.dither_divisors[d], [b, d](const TrialOutcome &o) { return o.dithered[b][d]; });
                    break;
                case Method::DirectIdeal:
                    emit_cell(m, b, 0.0, [](const TrialOutcome &o) { return o.ideal; });
                    break;
                case Method::Indirect:
                    emit_cell(m, b, 0.0, [](const TrialOutcome &o) { return o.indirect; });
                    break;
                }
    }
    return result;
}

RmsSummary summarize(std::span<const TrialRecord> records)
{
    RmsSummary s;
    if (records.empty())
        return s;
    s.method = records.front().method;
    s.snr_db = records.front().snr_db;
    s.b_over_m = records.front().b_over_m;
    s.dither_divisor = records.front().dither_divisor;
    s.trials = records.size();
    const auto n = static_cast<double>(records.size());
    double mean = 0.0;
    for (const auto &r : records)
        mean += r.sq_error;
    mean /= n;
    s.rms = std::sqrt(mean);
    if (records.size() > 1 && s.rms > 0.0)
    {
        double var = 0.0;
        for (const auto &r : records)
            var += (r.sq_error - mean) * (r.sq_error - mean);
        var /= (n - 1.0);
        s.rms_stderr = std::sqrt(var / n) / (2.0 * s.rms);
    }
    return s;
}

std::vector<TrialRecord> select_cell(const ExperimentResult &result, Method method, double snr_db, double b_over_m,
                                     double dither_divisor)
{
    std::vector<TrialRecord> out;
    for (const auto &r : result.trials)
        if (r.method == method && std::abs(r.snr_db - snr_db) < 1e-9 && std::abs(r.b_over_m - b_over_m) < 1e-9 &&
            std::abs(r.dither_divisor - dither_divisor) < 1e-9)
            out.push_back(r);
    return out;
}

PairedDifference paired_rms_difference(std::span<const TrialRecord> a, std::span<const TrialRecord> b)
{
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("paired_rms_difference: cells must be non-empty and of equal size");
    const auto n = static_cast<double>(a.size());
    PairedDifference d;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        if (a[i].trial != b[i].trial)
            throw std::invalid_argument("paired_rms_difference: records are not trial-paired");
        ma += a[i].sq_error;
        mb += b[i].sq_error;
    }
    ma /= n;
    mb /= n;
    d.rms_a = std::sqrt(ma);
    d.rms_b = std::sqrt(mb);
    d.difference = d.rms_a - d.rms_b;
    if (a.size() < 2)
        return d;

    const double ga = d.rms_a > 0.0 ? 1.0 / (2.0 * d.rms_a) : 0.0;
    const double gb = d.rms_b > 0.0 ? 1.0 / (2.0 * d.rms_b) : 0.0;
    const double mean_infl = ga * ma - gb * mb;
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const double infl = ga * a[i].sq_error - gb * b[i].sq_error - mean_infl;
        var += infl * infl;
    }
    var /= (n - 1.0);
    d.standard_error = std::sqrt(var / n);
    return d;
}

std::vector<CrbRow> crb_sweep(const ExperimentConfig &cfg_in)
{
    cfg_in.validate();
    ExperimentConfig cfg = cfg_in;
    cfg.calibration = calibrate(cfg, true);
    const std::size_t nru = cfg.scenario.radio_units.size();
    const std::vector<double> equal_pattern(nru, 1.0);

    std::vector<CrbRow> rows;
    for (double snr : cfg.crb.snr_db)
    {
        const std::vector<double> per_ru = *find_calibration(cfg.calibration, snr);
        double shared = 0.0;
        for (double r : per_ru)
            shared += r;
        shared /= static_cast<double>(per_ru.size());

        const Scenario base = build_scenario(cfg.scenario, snr, cfg.crb.b_over_m.front(), equal_pattern);
        std::vector<ParamVector> thetas;
        for (int n = 0; n < cfg.crb.positions; ++n)
        {
            Rng rng(derive_seed(cfg.seed, {crb_stream, seed_tag(snr), static_cast<std::uint64_t>(n)}));
            const ChannelDraw draw = draw_channel(base, TransmitTimePrior{0.0, 0.0}, rng);
            thetas.push_back({draw.source, draw.gains, 0.0});
        }

        for (double bm : cfg.crb.b_over_m)
        {
            const Scenario scn =
                build_scenario(cfg.scenario, snr, bm, equal_pattern, std::vector<double>(nru, shared));
            CrbRow row;
            row.snr_db = snr;
            row.b_over_m = bm;
            row.levels = levels_for_rate(scn.radio_units.front().fronthaul_bits, cfg.scenario.num_antennas);
            row.r_max = shared;
            std::vector<CrbPair> pairs(thetas.size());
            std::vector<char> ok(thetas.size(), 0);
            parallel_for(thetas.size(), cfg.threads, [&](std::size_t n) {
                try
                {
                    pairs[n] = position_crbs(scn, thetas[n]);
                    ok[n] = 1;
                }
                catch (const CrbError &)
                {
                }
            });
            for (std::size_t n = 0; n < thetas.size(); ++n)
            {
                if (!ok[n])
                {
                    ++row.skipped;
                    continue;
                }
                row.crb_quantized += pairs[n].quantized;
                row.crb_unquantized += pairs[n].unquantized;
                row.mean_pointwise_ratio += pairs[n].ratio();
                ++row.positions;
            }
            if (row.positions > 0)
            {
                const auto cnt = static_cast<double>(row.positions);
                row.crb_quantized /= cnt;
                row.crb_unquantized /= cnt;
                row.mean_pointwise_ratio /= cnt;
                row.ratio = row.crb_unquantized / row.crb_quantized;
            }
            row.quantization_loss = quantization_loss(row.levels, shared, std::sqrt(scn.radio_units.front().noise_power));
            rows.push_back(row);
        }
    }
    return rows;
}

void emit_results(const ExperimentResult &result, const std::filesystem::path &dir)
{
    ensure_directory(dir);

    const auto trials_path = dir / "trials.csv";
    auto trials = open_for_write(trials_path);
    trials << "trial,method,snr_db,b_over_m,dither_divisor,x_true,y_true,x_hat,y_hat,sq_error,seed\n";
    for (const auto &r : result.trials)
        trials << r.trial << ',' << to_string(r.method) << ',' << fmt(r.snr_db) << ',' << fmt(r.b_over_m) << ','
               << fmt(r.dither_divisor) << ',' << fmt(r.p_true.x) << ',' << fmt(r.p_true.y) << ',' << fmt(r.p_hat.x)
               << ',' << fmt(r.p_hat.y) << ',' << fmt(r.sq_error) << ',' << r.seed << '\n';
    close_checked(trials, trials_path);

    const auto summary_path = dir / "summary.csv";
    auto summary = open_for_write(summary_path);
    summary << "method,snr_db,b_over_m,dither_divisor,rms,trials,rms_stderr\n";
    for (const auto &s : result.summaries)
        summary << to_string(s.method) << ',' << fmt(s.snr_db) << ',' << fmt(s.b_over_m) << ','
                << fmt(s.dither_divisor) << ',' << fmt(s.rms) << ',' << s.trials << ',' << fmt(s.rms_stderr) << '\n';
    close_checked(summary, summary_path);

    save_config(result.config, dir / "config.json");
}

void emit_crb(const std::vector<CrbRow> &rows, const ExperimentConfig &cfg, const std::filesystem::path &dir)
{
    ensure_directory(dir);
    const auto path = dir / "crb.csv";
    auto out = open_for_write(path);
    out << "snr_db,b_over_m,levels,r_max,crb_quantized,crb_unquantized,ratio,mean_pointwise_ratio,"
           "quantization_loss,positions,skipped\n";
    for (const auto &r : rows)
        out << fmt(r.snr_db) << ',' << fmt(r.b_over_m) << ',' << r.levels << ',' << fmt(r.r_max) << ','
            << fmt(r.crb_quantized) << ',' << fmt(r.crb_unquantized) << ',' << fmt(r.ratio) << ','
            << fmt(r.mean_pointwise_ratio) << ',' << fmt(r.quantization_loss) << ',' << r.positions << ','
            << r.skipped << '\n';
    close_checked(out, path);

    ExperimentConfig resolved = cfg;
    resolved.calibration = calibrate(cfg, true);
    save_config(resolved, dir / "config.json");
}

} // namespace cranloc
