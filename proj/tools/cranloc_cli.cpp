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

// Batch driver: calibrate, simulate, crb-sweep, lq.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cranloc/config.hpp"
#include "cranloc/crb.hpp"
#include "cranloc/experiment.hpp"
#include "cranloc/fronthaul.hpp"

using namespace cranloc;

namespace
{

struct CommonOptions
{
    std::string config;
    std::string out = "results";
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string methods;
    std::string dither;
};

void add_common(CLI::App *cmd, CommonOptions &opt, bool monte_carlo)
{
    cmd->add_option("--config", opt.config, "Experiment config (JSON); built-in reference config if omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out, "Output directory");
    cmd->add_option("--seed", opt.seed, "Master seed");
    cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    if (monte_carlo)
    {
        cmd->add_option("--trials", opt.trials, "Monte Carlo trials per sweep cell")->check(CLI::PositiveNumber);
        cmd->add_option("--methods", opt.methods,
                        "Comma-separated subset of direct-quantized,direct-dithered,direct-ideal,indirect");
        cmd->add_option("--dither", opt.dither, "on: first divisor only, off: no dithered method, sweep: all divisors")
            ->check(CLI::IsMember({"on", "off", "sweep"}));
    }
}

ExperimentConfig resolve(const CommonOptions &opt)
{
    ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
    if (opt.trials)
        cfg.trials = *opt.trials;
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.threads)
        cfg.threads = *opt.threads;
    if (!opt.methods.empty())
    {
        cfg.methods.clear();
        std::stringstream ss(opt.methods);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                cfg.methods.push_back(parse_method(item));
    }
    if (opt.dither == "off")
        std::erase(cfg.methods, Method::DirectDithered);
    else if (opt.dither == "on")
    {
        if (cfg.dither_divisors.size() > 1)
            cfg.dither_divisors.resize(1);
        if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::DirectDithered) == cfg.methods.end())
            cfg.methods.push_back(Method::DirectDithered);
    }
    else if (opt.dither == "sweep" &&
             std::find(cfg.methods.begin(), cfg.methods.end(), Method::DirectDithered) == cfg.methods.end())
        cfg.methods.push_back(Method::DirectDithered);
    cfg.indirect.grid = cfg.grid;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cranloc: direct and indirect source localization over quantized C-RAN fronthaul"};
    app.require_subcommand(1);

    CommonOptions cal_opt, sim_opt, crb_opt;
    auto *cal_cmd = app.add_subcommand("calibrate", "Calibrate quantizer dynamic ranges and write the resolved config");
    add_common(cal_cmd, cal_opt, false);
    auto *sim_cmd = app.add_subcommand("simulate", "Run the RMS-versus-fronthaul Monte Carlo sweep");
    add_common(sim_cmd, sim_opt, true);
    auto *crb_cmd = app.add_subcommand("crb-sweep", "Compare CRB^UQ / CRB^Q against the quantization loss L_Q");
    add_common(crb_cmd, crb_opt, false);

    int lq_levels = 4;
    double lq_rmax = 1.0;
    double lq_sigma = 1.0;
    auto *lq_cmd = app.add_subcommand("lq", "Evaluate the low-SNR quantization loss factor");
    lq_cmd->add_option("--levels", lq_levels, "Quantizer levels L")->check(CLI::Range(2, 1 << 30));
    lq_cmd->add_option("--r-max", lq_rmax, "Dynamic-range half-width")->check(CLI::PositiveNumber);
    lq_cmd->add_option("--sigma", lq_sigma, "Noise standard deviation per complex sample")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*cal_cmd)
        {
            ExperimentConfig cfg = resolve(cal_opt);
            cfg.calibration = calibrate(cfg, true);
            std::filesystem::create_directories(cal_opt.out);
            save_config(cfg, std::filesystem::path(cal_opt.out) / "config.json");
            std::cout << "snr_db,ru,r_max\n";
            for (const auto &[snr, values] : cfg.calibration.r_max_by_snr)
                for (std::size_t j = 0; j < values.size(); ++j)
                    std::cout << snr << ',' << j << ',' << values[j] << '\n';
        }
        else if (*sim_cmd)
        {
            const ExperimentConfig cfg = resolve(sim_opt);
            const ExperimentResult result = run_experiment(cfg);
            emit_results(result, sim_opt.out);
            std::printf("%-18s %8s %8s %8s %12s %10s\n", "method", "snr_db", "b/M", "divisor", "rms_m", "stderr");
            for (const auto &s : result.summaries)
                std::printf("%-18s %8.2f %8.2f %8.2f %12.3f %10.3f\n", to_string(s.method).c_str(), s.snr_db,
                            s.b_over_m, s.dither_divisor, s.rms, s.rms_stderr);
        }
        else if (*crb_cmd)
        {
            const ExperimentConfig cfg = resolve(crb_opt);
            const auto rows = crb_sweep(cfg);
            emit_crb(rows, cfg, crb_opt.out);
            std::printf("%8s %6s %6s %14s %14s %8s %8s %8s\n", "snr_db", "b/M", "L", "crb_q_m2", "crb_uq_m2", "ratio",
                        "L_Q", "skipped");
            for (const auto &r : rows)
                std::printf("%8.2f %6.2f %6d %14.4g %14.4g %8.4f %8.4f %8zu\n", r.snr_db, r.b_over_m, r.levels,
                            r.crb_quantized, r.crb_unquantized, r.ratio, r.quantization_loss, r.skipped);
        }
        else if (*lq_cmd)
        {
            std::printf("%.12g\n", quantization_loss(lq_levels, lq_rmax, lq_sigma));
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
