// SPDX-License-Identifier: Apache-2.0
//
// midchan - mid-band indoor radio channel toolkit
// Copyright (C) 2026 The midchan authors
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

#include "midchan/pathloss.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace midchan;
using pathloss::Aggregation;

namespace
{
    std::vector<pathloss::PathLossSample> samples_for(double fc, double n, const std::vector<double> &d,
                                                      const std::vector<double> &shadow)
    {
        pathloss::CIParams p;
        p.carrier_GHz = fc;
        p.n = n;
        std::vector<pathloss::PathLossSample> s;
        for (std::size_t i = 0; i < d.size(); ++i)
            s.push_back({d[i], pathloss::ci_predict(p, d[i], shadow.empty() ? 0.0 : shadow[i]), Environment::LOS,
                         Aggregation::Omni});
        return s;
    }
} // namespace

TEST_SUITE("pathloss")
{
    TEST_CASE("FSPL at 1 m anchors")
    {
        // hand evaluation of 32.4 + 20 log10(f)
        CHECK(std::abs(pathloss::fspl_1m(6.75) - 48.987) <= 0.001);
        CHECK(std::abs(pathloss::fspl_1m(16.95) - 56.984) <= 0.001);
        CHECK(pathloss::fspl_1m(1.0) == doctest::Approx(32.4));
        CHECK_THROWS_AS(pathloss::fspl_1m(0.0), ValidationError);
    }

    TEST_CASE("CI prediction")
    {
        pathloss::CIParams p;
        p.carrier_GHz = 6.75;
        p.n = 2.0;
        // free space at 4 m
        CHECK(pathloss::ci_predict(p, 4.0) == doctest::Approx(61.0273).epsilon(1e-5));
        CHECK(pathloss::ci_predict(p, 1.0) == doctest::Approx(pathloss::fspl_1m(6.75)));
        CHECK(pathloss::ci_predict(p, 10.0, 3.0) == doctest::Approx(pathloss::fspl_1m(6.75) + 23.0));
        CHECK_THROWS_AS(pathloss::ci_predict(p, 0.5), ValidationError);

        // decade slope is 10 n
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> nd(1.0, 6.0), dd(1.0, 100.0);
        for (int i = 0; i < 100; ++i)
        {
            p.n = nd(rng);
            const double d = dd(rng);
            CHECK(pathloss::ci_predict(p, 10.0 * d) - pathloss::ci_predict(p, d) == doctest::Approx(10.0 * p.n));
        }
    }

    TEST_CASE("CI fit recovers noiseless exponents exactly")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> nd(1.0, 6.0), dd(1.0, 100.0);
        for (int t = 0; t < 100; ++t)
        {
            const double n = nd(rng);
            std::vector<double> d(20);
            for (auto &x : d)
                x = dd(rng);
            const auto fit = pathloss::ci_fit(samples_for(16.95, n, d, {}), 16.95);
            CHECK(std::abs(fit.n - n) < 1e-9);
            CHECK(fit.sigma_dB < 1e-9);
        }
    }

    TEST_CASE("CI fit matches least-squares oracle under shadowing")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> dd(11.0, 97.0);
        std::vector<double> d(500), sh(500), pl;
        for (std::size_t i = 0; i < d.size(); ++i)
        {
            d[i] = dd(rng);
            sh[i] = pathloss::sample_shadowing(6.0, rng);
        }
        const auto s = samples_for(6.75, 2.4, d, sh);
        for (const auto &x : s)
            pl.push_back(x.path_loss_dB);
        const auto fit = pathloss::ci_fit(s, 6.75);
        CHECK(fit.n == doctest::Approx(oracle::ci_exponent(d, pl, 6.75)).epsilon(1e-12));

        double ss = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
        {
            const double r = pl[i] - (oracle::fspl_1m(6.75) + 10.0 * fit.n * std::log10(d[i]));
            ss += r * r;
        }
        CHECK(fit.sigma_dB == doctest::Approx(std::sqrt(ss / d.size())).epsilon(1e-12));
    }

    TEST_CASE("CI fit preconditions")
    {
        auto s = samples_for(6.75, 2.0, {10.0}, {});
        CHECK_THROWS_AS(pathloss::ci_fit(s, 6.75), ValidationError);
        s = samples_for(6.75, 2.0, {1.0, 1.0}, {});
        CHECK_THROWS_AS(pathloss::ci_fit(s, 6.75), ComputationError);
        s = samples_for(6.75, 2.0, {2.0, 10.0}, {});
        s[0].distance_m = 0.5;
        CHECK_THROWS_AS(pathloss::ci_fit(s, 6.75), ValidationError);
        s = samples_for(6.75, 2.0, {5.0, 10.0}, {});
        s[1].environment = Environment::NLOS;
        CHECK_THROWS_AS(pathloss::ci_fit(s, 6.75), ValidationError);
    }

    TEST_CASE("shadowing sampler statistics")
    {
        std::mt19937_64 rng(5);
        double s1 = 0.0, s2 = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i)
        {
            const double x = pathloss::sample_shadowing(8.0, rng);
            s1 += x;
            s2 += x * x;
        }
        CHECK(std::abs(s1 / n) < 0.2);
        CHECK(std::sqrt(s2 / n) == doctest::Approx(8.0).epsilon(0.03));
        CHECK(pathloss::sample_shadowing(0.0, rng) == 0.0);
        CHECK_THROWS_AS(pathloss::sample_shadowing(-1.0, rng), ValidationError);
    }

    TEST_CASE("embedded CI parameters")
    {
        CHECK(pathloss::reference_ci_table().size() == 25);
        auto p = pathloss::reference_ci_params(6.75, Environment::LOS, Aggregation::Omni);
        CHECK(p.n == 1.40);
        CHECK(p.sigma_dB == 3.41);
        p = pathloss::reference_ci_params(16.95, Environment::NLOS, Aggregation::Directional);
        CHECK(p.n == 3.93);
        CHECK(p.sigma_dB == 14.90);
        p = pathloss::reference_ci_params(16.95, Environment::NLOS_Best, Aggregation::Directional);
        CHECK(p.n == 3.52);
        CHECK(p.sigma_dB == 9.28);
        CHECK_THROWS_AS(pathloss::reference_ci_params(6.75, Environment::NLOS_Best, Aggregation::Omni), ValidationError);
        CHECK_THROWS_AS(pathloss::reference_ci_params(10.0, Environment::LOS, Aggregation::Omni), ValidationError);
    }

    TEST_CASE("link-margin range")
    {
        const auto a = pathloss::reference_ci_params(6.75, Environment::NLOS, Aggregation::Omni);
        const auto b = pathloss::reference_ci_params(16.95, Environment::NLOS, Aggregation::Omni);
        CHECK(pathloss::max_range_m(a, 156.0) == doctest::Approx(oracle::max_range(6.75, 2.42, 156.0)).epsilon(1e-12));
        CHECK(pathloss::max_range_m(b, 159.0) == doctest::Approx(oracle::max_range(16.95, 3.07, 159.0)).epsilon(1e-12));
        CHECK(pathloss::max_range_m(a, 156.0) > 97.0);
        CHECK(pathloss::max_range_m(b, 159.0) > 97.0);
        CHECK(pathloss::ci_predict(a, pathloss::max_range_m(a, 156.0)) == doctest::Approx(156.0));
        CHECK_THROWS_AS(pathloss::max_range_m(a, 10.0), ValidationError);
    }
}
