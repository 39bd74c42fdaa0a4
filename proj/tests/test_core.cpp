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

#include "midchan/core.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace midchan;

TEST_SUITE("core")
{
    TEST_CASE("dB conversions")
    {
        CHECK(db_to_linear(0.0) == 1.0);
        CHECK(db_to_linear(30.0) == doctest::Approx(1000.0));
        CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
        CHECK(std::isinf(linear_to_db(0.0)));
        CHECK(linear_to_db(0.0) < 0.0);
        CHECK_THROWS_AS(linear_to_db(-1.0), ValidationError);
        CHECK_THROWS_AS(linear_to_db(std::numeric_limits<double>::quiet_NaN()), ValidationError);
        CHECK(db_to_linear(kNumericFloorDbm) > 0.0);
    }

    TEST_CASE("azimuth wrapping")
    {
        CHECK(wrap_azimuth(370.0).degrees() == doctest::Approx(10.0));
        CHECK(wrap_azimuth(-15.0).degrees() == doctest::Approx(345.0));
        CHECK(wrap_azimuth(360.0).degrees() == 0.0);
        CHECK(wrap_azimuth(-1e-17).degrees() == 0.0);
        CHECK_THROWS_AS(wrap_azimuth(std::numeric_limits<double>::infinity()), ValidationError);
        CHECK(wrap_signed_deg(190.0) == doctest::Approx(-170.0));
        CHECK(wrap_signed_deg(180.0) == doctest::Approx(-180.0));
        CHECK(wrap_signed_deg(-90.0) == doctest::Approx(-90.0));

        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-2000.0, 2000.0);
        for (int i = 0; i < 1000; ++i)
        {
            const double a = wrap_azimuth(u(rng)).degrees();
            CHECK(a >= 0.0);
            CHECK(a < 360.0);
        }
    }

    TEST_CASE("free-space delay")
    {
        CHECK(free_space_delay_ns(4.0) == doctest::Approx(13.3426).epsilon(1e-5));
        CHECK(free_space_delay_ns(11.0) == doctest::Approx(36.69205).epsilon(1e-6));
        CHECK(free_space_delay_ns(97.0) == doctest::Approx(oracle::delay_ns(97.0)).epsilon(1e-12));
        CHECK_THROWS_AS(free_space_delay_ns(0.0), ValidationError);
    }

    TEST_CASE("labels parse and print")
    {
        for (auto e : {Environment::LOS, Environment::NLOS, Environment::NLOS_Best})
            CHECK(parse_environment(to_string(e)) == e);
        CHECK(parse_environment("NLOS-Best") == Environment::NLOS_Best);
        CHECK(parse_polarization("V-H") == Polarization::VH);
        CHECK(parse_band_label("FR1(C)") == BandLabel::FR1C);
        CHECK_THROWS_AS(parse_environment("outdoor"), ValidationError);
        CHECK_THROWS_AS(parse_band_label("FR2"), ValidationError);
    }

    TEST_CASE("embedded bands")
    {
        const auto a = fr1c_band();
        CHECK(a.carrier_GHz == 6.75);
        CHECK(a.hpbw_deg == 30.0);
        CHECK(a.antenna_gain_dBi == 15.0);
        CHECK(a.eirp_dBm == 31.0);
        CHECK(a.link_margin_dB == 156.0);
        CHECK(a.azimuth_steps() == 12);
        CHECK(a.tx_power_dBm() == 16.0);

        const auto b = fr3_band();
        CHECK(b.carrier_GHz == 16.95);
        CHECK(b.hpbw_deg == 15.0);
        CHECK(b.antenna_gain_dBi == 20.0);
        CHECK(b.link_margin_dB == 159.0);
        CHECK(b.azimuth_steps() == 24);

        FrequencyBand odd = b;
        odd.hpbw_deg = 7.0;
        CHECK_FALSE(odd.sweepable());
        CHECK_THROWS_AS(odd.azimuth_steps(), ValidationError);
        CHECK_THROWS_AS(validate(odd), ValidationError);
        odd.label = BandLabel::Reference;
        CHECK_NOTHROW(validate(odd));
        CHECK_THROWS_AS(band_by_label(BandLabel::Reference), ValidationError);
    }

    TEST_CASE("azimuth grid index")
    {
        CHECK(azimuth_grid_index(0.0, 15.0) == 0);
        CHECK(azimuth_grid_index(345.0, 15.0) == 23);
        CHECK(azimuth_grid_index(360.0, 15.0) == 0);
        CHECK(azimuth_grid_index(17.0, 15.0) == -1);
        CHECK(azimuth_grid_index(-30.0, 30.0) == 11);
    }

    TEST_CASE("power delay profile")
    {
        PowerDelayProfile p(10.0, 2.0, {0.0, 1.0, 3.0, 3.0, 0.5}, -90.0);
        CHECK(p.size() == 5);
        CHECK(p.delay_ns(2) == 14.0);
        CHECK(p.total_power_mW() == doctest::Approx(7.5));
        CHECK(p.peak_index() == 2);
        CHECK(p.peak_power_mW() == 3.0);
        CHECK(p.same_grid(p.with_powers({1, 1, 1, 1, 1})));
        CHECK_FALSE(p.same_grid(p.with_start_delay(11.0)));
        CHECK(p.with_noise_floor(-80.0).noise_floor_dBm() == -80.0);

        CHECK_THROWS_AS(PowerDelayProfile(0.0, 0.0, {1.0}, -90.0), ValidationError);
        CHECK_THROWS_AS(PowerDelayProfile(0.0, 1.0, {-1.0}, -90.0), ValidationError);
        CHECK_THROWS_AS(PowerDelayProfile(std::numeric_limits<double>::infinity(), 1.0, {1.0}, -90.0), ValidationError);
    }

    TEST_CASE("circular shift")
    {
        PowerDelayProfile p(0.0, 1.0, {1, 2, 3, 4}, -90.0);
        const auto s = circular_shift(p, 1);
        CHECK(s.power_mW(0) == 4);
        CHECK(s.power_mW(1) == 1);
        CHECK(circular_shift(p, -5).power_mW(0) == 2);
        CHECK(circular_shift(circular_shift(p, 7), -7) == p);
        CHECK(s.start_delay_ns() == p.start_delay_ns());
    }

    TEST_CASE("local maxima")
    {
        const std::vector<double> x = {0, 1, 0, 2, 2, 2, 1, 0, 5};
        const auto m = local_maxima(x);
        REQUIRE(m.size() == 3);
        CHECK(m[0] == 1);
        CHECK(m[1] == 3); // plateau at its first bin
        CHECK(m[2] == 8); // edge counts against an implicit zero
        CHECK(local_maxima(std::vector<double>{0, 0, 0}).empty());
        CHECK(local_maxima(std::vector<double>{}).empty());
    }
}
