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
#include <limits>
#include <vector>

#include "cranloc/fronthaul.hpp"
#include "fixtures.hpp"

using namespace cranloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

FreqObservation constant_obs(Complex value, int m, int n, std::size_t nru = 1)
{
    FreqObservation obs;
    for (std::size_t j = 0; j < nru; ++j)
        obs.ru.push_back(Eigen::MatrixXcd::Constant(m, n, value));
    return obs;
}

} // namespace

TEST_CASE("one-bit quantizer splits at zero", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 2);
    CHECK(q.step() == 2.0);
    CHECK(q.threshold(1) == 0.0);
    CHECK(quantize_component(0.3, q) == 2);
    CHECK(quantize_component(-0.3, q) == 1);
    // cells are half-open on the left: (q_{l-1}, q_l]
    CHECK(quantize_component(0.0, q) == 1);
    CHECK(reconstruct(1, q) == -1.0);
    CHECK(reconstruct(2, q) == 1.0);
}

TEST_CASE("three-level quantizer", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 3);
    CHECK(q.step() == 1.0);
    CHECK(q.threshold(1) == -0.5);
    CHECK(q.threshold(2) == 0.5);
    CHECK(quantize_component(0.4, q) == 2);
    CHECK(reconstruct(2, q) == 0.0);
    CHECK(quantize_component(0.5, q) == 2);
    CHECK(quantize_component(0.5000001, q) == 3);
    CHECK(q.threshold(0) == -std::numeric_limits<double>::infinity());
    CHECK(q.threshold(3) == std::numeric_limits<double>::infinity());
}

TEST_CASE("out-of-range inputs saturate", "[fronthaul]")
{
    for (int levels : {2, 3, 16, 255})
    {
        const auto q = make_quantizer(0.7, levels);
        CHECK(quantize_component(10.0, q) == levels);
        CHECK(quantize_component(-10.0, q) == 1);
        CHECK(quantize_component(1e300, q) == levels);
    }
}

TEST_CASE("reconstruct rejects indices outside the level range", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 4);
    CHECK_THROWS_AS(reconstruct(0, q), ScenarioError);
    CHECK_THROWS_AS(reconstruct(5, q), ScenarioError);
    CHECK_THROWS_AS(make_quantizer(0.0, 4), ScenarioError);
    CHECK_THROWS_AS(make_quantizer(1.0, 1), ScenarioError);
}

TEST_CASE("round trip returns the nearest representation point", "[fronthaul]")
{
    for (int levels : {2, 3, 4, 7, 16})
    {
        const auto q = make_quantizer(1.3, levels);
        for (int i = 0; i <= 20000; ++i)
        {
            const double x = -1.3 + 2.6 * i / 20000.0;
            const double got = reconstruct(quantize_component(x, q), q);
            double best = 1e9;
            for (int l = 1; l <= levels; ++l)
                best = std::min(best, std::abs(x - (-1.3 + (l - 1) * q.step())));
            CHECK_THAT(std::abs(x - got), WithinAbs(best, 1e-12));
        }
    }
}

TEST_CASE("quantizer is monotone and representation points are cell midpoints", "[fronthaul]")
{
    const auto q = make_quantizer(2.0, 9);
    int prev = 1;
    for (int i = 0; i <= 4000; ++i)
    {
        const int l = quantize_component(-3.0 + 6.0 * i / 4000.0, q);
        CHECK(l >= prev);
        prev = l;
    }
    for (int l = 2; l < 9; ++l)
        CHECK_THAT(q.representation(l), WithinAbs(0.5 * (q.threshold(l - 1) + q.threshold(l)), 1e-14));
}

TEST_CASE("level count from the fronthaul rate", "[fronthaul]")
{
    CHECK(levels_for_rate(16.0, 8) == 2);  // 2^1
    CHECK(levels_for_rate(32.0, 8) == 4);  // 2^2
    CHECK(levels_for_rate(64.0, 8) == 16); // 2^4
    CHECK(levels_for_rate(8.0, 8) == 2);   // sqrt(2) rounds to 1, floored at 2
    CHECK(levels_for_rate(24.0, 8) == 3);  // 2^1.5 = 2.83
    CHECK(levels_for_rate(48.0, 8) == 8);  // 2^3
}

TEST_CASE("fine quantization error stays within half a step plus the dither", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 1 << 16);
    std::vector<UniformQuantizerSpec> qs{q};
    Rng rng(2);
    FreqObservation obs;
    obs.ru.push_back(Eigen::MatrixXcd::Random(4, 32) * 0.7);
    for (bool on : {false, true})
    {
        const auto out = fronthaul_round_trip(obs, qs, {2.0, on}, rng);
        const double err = (out.recovered.ru[0] - obs.ru[0]).cwiseAbs().maxCoeff();
        CHECK(err <= std::sqrt(2.0) * (q.step() / 2 + (on ? q.step() / 2 : 0.0)));
        CHECK(out.quantized.ru[0].dither.has_value() == on);
    }
}

TEST_CASE("points on the representation grid pass through undithered quantization", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 5); // points -1, -0.5, 0, 0.5, 1
    std::vector<UniformQuantizerSpec> qs{q};
    Rng rng(1);
    FreqObservation obs = constant_obs(Complex(0.5, -1.0), 2, 3);
    const auto out = fronthaul_round_trip(obs, qs, {}, rng);
    CHECK((out.recovered.ru[0] - obs.ru[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.quantized.ru[0].re_levels(1, 2) == 4);
    CHECK(out.quantized.ru[0].im_levels(0, 0) == 1);
}

TEST_CASE("subtractive dither removes the quantizer bias on average", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 4);
    std::vector<UniformQuantizerSpec> qs{q};
    Rng rng(7);
    const Complex x(0.21, -0.43); // biased cell positions without dither
    FreqObservation obs = constant_obs(x, 8, 64);
    Complex acc_dither = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r)
        acc_dither += (fronthaul_round_trip(obs, qs, {2.0, true}, rng).recovered.ru[0].array() - x).mean();
    const Complex plain = (fronthaul_round_trip(obs, qs, {}, rng).recovered.ru[0].array() - x).mean();
    CHECK(std::abs(acc_dither / double(reps)) < 0.005);
    CHECK(std::abs(plain) > 0.1);
}

TEST_CASE("dither only shifts the quantizer input", "[fronthaul]")
{
    const auto q = make_quantizer(1.0, 8);
    std::vector<UniformQuantizerSpec> qs{q};
    Rng rng(4);
    FreqObservation obs;
    obs.ru.push_back(Eigen::MatrixXcd::Random(3, 8));
    const auto out = fronthaul_round_trip(obs, qs, {3.0, true}, rng);
    const auto &u = out.quantized.ru[0];
    REQUIRE(u.dither.has_value());
    CHECK(u.dither->real().cwiseAbs().maxCoeff() <= q.step() / 3.0);
    CHECK(u.dither->imag().cwiseAbs().maxCoeff() <= q.step() / 3.0);
    for (Eigen::Index k = 0; k < 8; ++k)
        for (Eigen::Index m = 0; m < 3; ++m)
        {
            const Complex in = obs.ru[0](m, k) + (*u.dither)(m, k);
            CHECK(u.re_levels(m, k) == quantize_component(in.real(), q));
            CHECK(u.im_levels(m, k) == quantize_component(in.imag(), q));
            const Complex rec(q.representation(u.re_levels(m, k)), q.representation(u.im_levels(m, k)));
            CHECK(std::abs(out.recovered.ru[0](m, k) - (rec - (*u.dither)(m, k))) < 1e-15);
        }
}

TEST_CASE("round trip validates its inputs", "[fronthaul]")
{
    Rng rng(1);
    FreqObservation obs = constant_obs(Complex(0.0, 0.0), 2, 2, 2);
    std::vector<UniformQuantizerSpec> one{make_quantizer(1.0, 2)};
    CHECK_THROWS_AS(fronthaul_round_trip(obs, one, {}, rng), ScenarioError);
    std::vector<UniformQuantizerSpec> two(2, make_quantizer(1.0, 2));
    CHECK_THROWS_AS(fronthaul_round_trip(obs, two, {0.0, true}, rng), ScenarioError);
}

TEST_CASE("rate-distortion weights", "[fronthaul]")
{
    Scenario scn = fixture::square(8, 8, 1.0, 4000.0, 500.0, 1);
    scn.radio_units[0].fronthaul_bits = 8.0; // B/M = 1
    const auto w = effective_weights(scn);
    for (int k = 0; k < 8; ++k)
        CHECK_THAT(w.gamma2[0][k], WithinRel(2.125, 1e-14));

    double prev = w.gamma2[0][0];
    for (double bm : {2.0, 4.0, 8.0, 16.0})
    {
        scn.radio_units[0].fronthaul_bits = bm * 8.0;
        const double g = effective_weights(scn).gamma2[0][0];
        CHECK(g < prev);
        CHECK(g > 1.0);
        prev = g;
    }
    scn.radio_units[0].fronthaul_bits = 64.0 * 8.0;
    CHECK_THAT(effective_weights(scn).gamma2[0][0], WithinRel(1.0, 1e-15));
    CHECK(unquantized_weights(scn).gamma2[0][3] == 1.0);

    scn.radio_units[0].fronthaul_bits = 0.0;
    CHECK_THROWS_AS(effective_weights(scn), ScenarioError);
}

TEST_CASE("calibrated range on pure noise matches the Gaussian quantile", "[fronthaul]")
{
    Scenario scn = fixture::square(4, 8, 1.0, 4000.0, 500.0, 1);
    scn.radio_units[0].mean_channel_power = 0.0;
    Rng rng(10);
    const auto r = calibrate_dynamic_range(scn, 0.95, 2000, {}, rng);
    REQUIRE(r.size() == 1);
    CHECK_THAT(r[0], WithinRel(1.959964 / std::sqrt(2.0), 0.02));
}

TEST_CASE("calibration is deterministic and validates its arguments", "[fronthaul]")
{
    Scenario scn = fixture::square(2, 4, 0.1);
    Rng a(3), b(3);
    CHECK(calibrate_dynamic_range(scn, 0.9, 1000, {0.0, 1e-6}, a) ==
          calibrate_dynamic_range(scn, 0.9, 1000, {0.0, 1e-6}, b));
    CHECK_THROWS_AS(calibrate_dynamic_range(scn, 1.0, 1000, {}, a), ScenarioError);
    CHECK_THROWS_AS(calibrate_dynamic_range(scn, 0.0, 1000, {}, a), ScenarioError);
    CHECK_THROWS_AS(calibrate_dynamic_range(scn, 0.95, 999, {}, a), ScenarioError);

    Scenario dead = scn;
    for (auto &ru : dead.radio_units)
    {
        ru.noise_power = 0.0;
        ru.mean_channel_power = 0.0;
    }
    CHECK_THROWS_AS(calibrate_dynamic_range(dead, 0.95, 1000, {}, a), ScenarioError);
}
