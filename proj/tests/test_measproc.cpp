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

#include "midchan/measproc.hpp"
#include "midchan/pathloss.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace midchan;
using namespace midchan::measproc;

namespace
{
    PowerDelayProfile pdp_of(std::vector<double> p, double floor_dBm = -200.0, double start = 0.0, double bin = 1.0)
    {
        return PowerDelayProfile(start, bin, std::move(p), floor_dBm);
    }

    MeasurementRecord record(const FrequencyBand &band, double rx_az, PowerDelayProfile pdp, int rx_tilt = 0,
                             double tx_az = 0.0, int tx_tilt = 0)
    {
        MeasurementRecord r;
        r.location_id = "RX1";
        r.band = band.label;
        r.polarization = Polarization::VV;
        r.tx_azimuth = wrap_azimuth(tx_az);
        r.rx_azimuth = wrap_azimuth(rx_az);
        r.tx_tilt = tx_tilt;
        r.rx_tilt = rx_tilt;
        r.tx_gain_dBi = band.antenna_gain_dBi;
        r.rx_gain_dBi = band.antenna_gain_dBi;
        r.pdp = std::move(pdp);
        return r;
    }

    // Every RX azimuth of the band, with the given per-direction total power at one delay bin.
    std::vector<MeasurementRecord> full_circle(const FrequencyBand &band, const std::vector<double> &per_dir_mW,
                                               std::size_t bins = 64, std::size_t at = 10)
    {
        std::vector<MeasurementRecord> recs;
        const double g = db_to_linear(2.0 * band.antenna_gain_dBi);
        for (int i = 0; i < band.azimuth_steps(); ++i)
        {
            std::vector<double> p(bins, 0.0);
            p[at] = per_dir_mW[static_cast<std::size_t>(i)] * g;
            recs.push_back(record(band, i * band.hpbw_deg, pdp_of(std::move(p))));
        }
        return recs;
    }

    PowerAngularSpectrum pas_of(std::vector<double> p, double step)
    {
        PowerAngularSpectrum pas;
        pas.step_deg = step;
        pas.powers_mW = std::move(p);
        return pas;
    }
} // namespace

TEST_SUITE("measproc")
{
    TEST_CASE("noise floor estimate")
    {
        // Noise averaged over 20 correlator periods (gamma-distributed bin power) at -90 dBm.
        std::mt19937_64 rng(1);
        const double mean = db_to_linear(-90.0);
        std::gamma_distribution<double> noise(20.0, mean / 20.0);
        for (int trial = 0; trial < 20; ++trial)
        {
            std::vector<double> p(2000);
            for (double &x : p)
                x = noise(rng);
            p[300] = db_to_linear(-50.0);
            p[301] = db_to_linear(-56.0);
            const auto est = estimate_noise_floor(pdp_of(p, NAN));
            CHECK(std::abs(est.floor_dBm + 90.0) <= 0.5);
            CHECK_FALSE(est.degenerate);
            CHECK(est.noise_bins == 300);
        }

        std::vector<double> clean(200, 0.0);
        clean[100] = 1e-6;
        const auto deg = estimate_noise_floor(pdp_of(clean, NAN));
        CHECK(deg.degenerate);
        CHECK(deg.floor_dBm == kNumericFloorDbm);

        std::vector<double> early(200, 1e-12);
        early[0] = 1e-6;
        CHECK_THROWS_AS(estimate_noise_floor(pdp_of(early, NAN)), ComputationError);
        CHECK_THROWS_AS(estimate_noise_floor(pdp_of(std::vector<double>(20, 1e-9), NAN)), ComputationError);
    }

    TEST_CASE("threshold rule")
    {
        std::vector<double> p(10, 0.0);
        p[2] = db_to_linear(-60.0);
        CHECK(pdp_threshold_dBm(pdp_of(p, -95.0)) == doctest::Approx(-85.0));
        p[2] = db_to_linear(-88.0);
        CHECK(pdp_threshold_dBm(pdp_of(p, -95.0)) == doctest::Approx(-90.0));

        // A lone bin above floor + 5 is untouched.
        std::vector<double> one{db_to_linear(-70.0)};
        CHECK(threshold_pdp(pdp_of(one, -95.0)) == pdp_of(one, -95.0));

        // Nothing above the threshold.
        std::vector<double> low(10, db_to_linear(-93.0));
        CHECK_THROWS_AS(threshold_pdp(pdp_of(low, -95.0)), ComputationError);
        CHECK(apply_threshold(pdp_of(low, -95.0)).total_power_mW() == 0.0);
    }

    TEST_CASE("threshold matches the dB-domain oracle and keeps the peak")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> level(-120.0, -40.0), floor(-110.0, -70.0);
        for (int trial = 0; trial < 1000; ++trial)
        {
            std::vector<double> p(64);
            for (double &x : p)
                x = db_to_linear(level(rng));
            const double f = floor(rng);
            const auto out = apply_threshold(pdp_of(p, f));
            const auto keep = oracle::threshold_keep(p, f);
            for (std::size_t i = 0; i < p.size(); ++i)
                CHECK((out.power_mW(i) > 0.0) == keep[i]);
            if (linear_to_db(*std::max_element(p.begin(), p.end())) >= f + 5.0)
                CHECK(out.power_mW(out.peak_index()) == *std::max_element(p.begin(), p.end()));
        }
    }

    TEST_CASE("multipath extraction")
    {
        std::vector<double> p(50, 0.0);
        p[5] = 1.0;
        p[30] = 0.5;
        auto m = extract_mpcs(pdp_of(p, -200.0, 10.0));
        REQUIRE(m.size() == 2);
        CHECK(m[0].delay_ns == 15.0);
        CHECK(m[1].delay_ns == 40.0);
        CHECK(m[1].power_mW == 0.5);

        std::vector<double> plateau(20, 0.0);
        plateau[7] = plateau[8] = plateau[9] = 2.0;
        m = extract_mpcs(pdp_of(plateau));
        REQUIRE(m.size() == 1);
        CHECK(m[0].delay_ns == 7.0);

        CHECK(extract_mpcs(pdp_of(std::vector<double>(20, 0.0))).empty());
        CHECK(extract_mpcs(PowerDelayProfile{}).empty());
    }

    TEST_CASE("RMS delay spread examples")
    {
        std::vector<double> p(64, 0.0);
        p[7] = 1.0;
        CHECK(rms_delay_spread(pdp_of(p)) == 0.0);
        p.assign(64, 0.0);
        p[0] = p[20] = 1.0;
        CHECK(rms_delay_spread(pdp_of(p)) == doctest::Approx(10.0));
        p.assign(64, 0.0);
        p[0] = 1.0;
        p[30] = 0.25;
        CHECK(rms_delay_spread(pdp_of(p)) == doctest::Approx(12.0));
        CHECK_THROWS_AS(rms_delay_spread(pdp_of(std::vector<double>(8, 0.0))), ComputationError);

        const auto mom = delay_moments(pdp_of(p, -200.0, 5.0));
        CHECK(mom.mean_delay_ns == doctest::Approx(11.0));
        CHECK(mom.mean_excess_delay_ns == doctest::Approx(6.0));
    }

    TEST_CASE("RMS delay spread oracle and invariances")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 1000; ++trial)
        {
            std::vector<double> p(128);
            for (double &x : p)
                x = u(rng) < 0.2 ? std::pow(10.0, -5.0 * u(rng)) : 0.0;
            p[static_cast<std::size_t>(u(rng) * 127)] = 1.0;
            const double start = 100.0 * u(rng);
            const auto pdp = pdp_of(p, -200.0, start, 1.0);
            const double ds = rms_delay_spread(pdp);
            CHECK(ds == doctest::Approx(oracle::rms_delay_spread(pdp.delays_ns(), p)).epsilon(1e-9));

            auto scaled = p;
            for (double &x : scaled)
                x *= 1234.5;
            CHECK(rms_delay_spread(pdp_of(scaled, -200.0, start)) == doctest::Approx(ds).epsilon(1e-9));
            CHECK(rms_delay_spread(pdp_of(p, -200.0, start + 77.0)) == doctest::Approx(ds).epsilon(1e-9));
        }
    }

    TEST_CASE("capture set validation")
    {
        const auto band = fr1c_band();
        auto recs = full_circle(band, std::vector<double>(12, 1.0));
        CHECK_NOTHROW(DirectionalCaptureSet("RX1", Polarization::VV, band, recs));
        auto dup = recs;
        dup.push_back(recs.front());
        CHECK_THROWS_AS(DirectionalCaptureSet("RX1", Polarization::VV, band, dup), ValidationError);
        auto off = recs;
        off[3].rx_azimuth = wrap_azimuth(47.0);
        CHECK_THROWS_AS(DirectionalCaptureSet("RX1", Polarization::VV, band, off), ValidationError);
        auto pol = recs;
        pol[0].polarization = Polarization::VH;
        CHECK_THROWS_AS(DirectionalCaptureSet("RX1", Polarization::VV, band, pol), ValidationError);
        CHECK_THROWS_AS(DirectionalCaptureSet("RX1", Polarization::VV, band, {}), ValidationError);
    }

    TEST_CASE("omnidirectional synthesis")
    {
        const auto band = fr1c_band();
        const double g = db_to_linear(2.0 * band.antenna_gain_dBi);

        // One direction: omni equals the directional PDP with the gains removed.
        std::vector<double> p(64, 0.0);
        p[12] = 3.0 * g;
        p[20] = 1.0 * g;
        const std::vector<MeasurementRecord> single{record(band, 90.0, pdp_of(p))};
        const auto omni1 = synthesize_omni_pdp(single, band.hpbw_deg);
        CHECK(omni1.power_mW(12) == doctest::Approx(3.0));
        CHECK(omni1.power_mW(20) == doctest::Approx(1.0));

        // Two disjoint directions, 0 dBi, 1 mW each at 50 ns.
        auto unity = band;
        unity.antenna_gain_dBi = 0.0;
        std::vector<double> q(64, 0.0);
        q[50] = 1.0;
        const std::vector<MeasurementRecord> two{record(unity, 0.0, pdp_of(q)), record(unity, 30.0, pdp_of(q))};
        CHECK(synthesize_omni_pdp(two, 30.0).power_mW(50) == doctest::Approx(2.0));

        // The same cell measured twice counts once, strongest capture kept.
        std::vector<double> weak(64, 0.0);
        weak[50] = 0.5;
        const std::vector<MeasurementRecord> rep{record(unity, 0.0, pdp_of(q)), record(unity, 0.0, pdp_of(weak)),
                                                 record(unity, 0.0, pdp_of(q), 1)};
        const auto omni_rep = synthesize_omni_pdp(rep, 30.0);
        CHECK(omni_rep.power_mW(50) == doctest::Approx(2.0));
        CHECK(omni_rep.total_power_mW() <= 2.5);

        // Grid mismatch.
        const std::vector<MeasurementRecord> bad{record(unity, 0.0, pdp_of(q)),
                                                 record(unity, 30.0, pdp_of(q, -200.0, 1.0))};
        CHECK_THROWS_AS(synthesize_omni_pdp(bad, 30.0), ValidationError);
    }

    TEST_CASE("omni total power grows as directions are added")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto band = fr3_band();
        std::vector<MeasurementRecord> recs;
        double prev = 0.0;
        for (int k = 0; k < 60; ++k)
        {
            std::vector<double> p(32);
            for (double &x : p)
                x = u(rng);
            recs.push_back(record(band, 15.0 * static_cast<int>(u(rng) * 24), pdp_of(p),
                                  static_cast<int>(u(rng) * 3) - 1));
            const double total = synthesize_omni_pdp(recs, band.hpbw_deg).total_power_mW();
            CHECK(total >= prev);
            prev = total;
        }
    }

    TEST_CASE("omni path loss")
    {
        // Closed loop: one free-space path.
        const auto band = fr1c_band();
        const double d = 7.0;
        const double fspl = oracle::fspl_1m(band.carrier_GHz) + 20.0 * std::log10(d);
        const double tx = band.tx_power_dBm();
        std::vector<double> p(64, 0.0);
        p[23] = db_to_linear(tx - fspl + 2.0 * band.antenna_gain_dBi);
        const std::vector<MeasurementRecord> recs{record(band, 0.0, pdp_of(p))};
        const auto omni = synthesize_omni_pdp(recs, band.hpbw_deg);
        CHECK(std::abs(omni_path_loss(omni, tx) - fspl) <= 0.1);

        auto doubled = omni.powers_mW();
        std::vector<double> d2(doubled.begin(), doubled.end());
        for (double &x : d2)
            x *= 2.0;
        CHECK(omni_path_loss(omni.with_powers(d2), tx) - omni_path_loss(omni, tx) ==
              doctest::Approx(-10.0 * std::log10(2.0)));
        CHECK_THROWS_AS(omni_path_loss(omni.with_powers(std::vector<double>(64, 0.0)), tx), ComputationError);
    }

    TEST_CASE("power azimuth spectrum")
    {
        const auto band = fr3_band();
        std::vector<double> per(24, 0.0);
        per[5] = 2.0;
        const DirectionalCaptureSet delta("RX1", Polarization::VV, band, full_circle(band, per));
        const auto pas = build_pas(delta, PasSide::AOA);
        REQUIRE(pas.powers_mW.size() == 24);
        CHECK(pas.peak_index() == 5);
        CHECK(pas.powers_mW[5] > 0.0);
        for (std::size_t i = 0; i < 24; ++i)
            if (i != 5)
                CHECK(pas.powers_mW[i] == 0.0);

        const DirectionalCaptureSet flat("RX1", Polarization::VV, band, full_circle(band, std::vector<double>(24, 1.0)));
        const auto fp = build_pas(flat, PasSide::AOA);
        for (double x : fp.powers_mW)
            CHECK(x == doctest::Approx(fp.powers_mW[0]));

        auto partial = full_circle(band, std::vector<double>(24, 1.0));
        partial.pop_back();
        CHECK_THROWS_AS(build_pas(DirectionalCaptureSet("RX1", Polarization::VV, band, partial), PasSide::AOA),
                        ValidationError);
    }

    TEST_CASE("spatial lobes")
    {
        std::vector<double> delta(24, 0.0);
        delta[3] = 1.0;
        auto lobes = segment_lobes(pas_of(delta, 15.0));
        REQUIRE(lobes.size() == 1);
        CHECK(lobes[0].members == std::vector<int>{3});
        CHECK(lobes[0].peak_direction.degrees() == 45.0);

        std::vector<double> two(24, 0.001);
        two[2] = two[3] = 1.0;
        two[12] = 0.5;
        lobes = segment_lobes(pas_of(two, 15.0));
        CHECK(lobes.size() == 2);

        // 345, 0 and 15 deg form a single lobe across the wrap.
        std::vector<double> wrap(24, 0.0);
        wrap[23] = 0.8;
        wrap[0] = 1.0;
        wrap[1] = 0.5;
        lobes = segment_lobes(pas_of(wrap, 15.0));
        REQUIRE(lobes.size() == 1);
        CHECK(lobes[0].members == std::vector<int>{23, 0, 1});
        CHECK(lobes[0].peak_direction.degrees() == 0.0);
    }

    TEST_CASE("spatial lobes partition the directions above the threshold")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> db(-20.0, 0.0);
        for (int trial = 0; trial < 500; ++trial)
        {
            const std::size_t n = trial % 2 ? 24 : 12;
            std::vector<double> p(n);
            for (double &x : p)
                x = db_to_linear(db(rng));
            const double peak = *std::max_element(p.begin(), p.end());
            std::set<int> above, seen;
            for (std::size_t i = 0; i < n; ++i)
                if (p[i] >= peak * 0.1)
                    above.insert(static_cast<int>(i));
            for (const auto &lobe : segment_lobes(pas_of(p, 360.0 / n)))
            {
                for (std::size_t k = 0; k < lobe.members.size(); ++k)
                {
                    CHECK(seen.insert(lobe.members[k]).second);
                    CHECK(p[static_cast<std::size_t>(lobe.members[k])] >= peak * 0.1);
                    if (k > 0)
                        CHECK((lobe.members[k - 1] + 1) % static_cast<int>(n) == lobe.members[k]);
                }
            }
            CHECK(seen == above);
        }
    }

    TEST_CASE("angular spread examples")
    {
        std::vector<double> one(24, 0.0);
        one[7] = 1.0;
        CHECK(angular_spread(pas_of(one, 15.0), SpreadMode::Lobe) == doctest::Approx(0.0));

        const std::vector<double> a{0.0, 30.0}, w{1.0, 1.0};
        CHECK(circular_rms_spread_deg(a, w) == doctest::Approx(15.0));
        const std::vector<double> across{345.0, 15.0};
        CHECK(circular_rms_spread_deg(across, w) == doctest::Approx(15.0));

        const double uniform = angular_spread(pas_of(std::vector<double>(24, 1.0), 15.0), SpreadMode::Omni);
        CHECK(std::abs(uniform - 360.0 / std::sqrt(12.0)) <= 2.0);
        CHECK(std::abs(uniform - 103.9) <= 2.0);

        CHECK_THROWS_AS(angular_spread(pas_of(std::vector<double>(24, 0.0), 15.0), SpreadMode::Omni),
                        ComputationError);
    }

    TEST_CASE("angular spread oracle, rotation invariance and bound")
    {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 500; ++trial)
        {
            const std::size_t n = trial % 2 ? 24 : 12;
            const double step = 360.0 / static_cast<double>(n);
            std::vector<double> p(n), ang(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                p[i] = u(rng) < 0.5 ? std::pow(10.0, -3.0 * u(rng)) : 0.0;
                ang[i] = step * static_cast<double>(i);
            }
            p[static_cast<std::size_t>(u(rng) * static_cast<double>(n))] = 1.0;

            const double as = angular_spread(pas_of(p, step), SpreadMode::Lobe);
            CHECK(std::abs(as - oracle::circular_spread_scan(ang, p)) <= 0.05);

            const auto shift = static_cast<std::ptrdiff_t>(u(rng) * static_cast<double>(n));
            auto rotated = p;
            std::rotate(rotated.begin(), rotated.begin() + shift, rotated.end());
            CHECK(angular_spread(pas_of(rotated, step), SpreadMode::Lobe) == doctest::Approx(as).epsilon(1e-9));

            const double omni = angular_spread(pas_of(p, step), SpreadMode::Omni);
            CHECK(omni >= 0.0);
            CHECK(omni <= 360.0 / std::sqrt(12.0) * 1.02);
        }
    }

    TEST_CASE("omni spread ignores directions below the lobe threshold")
    {
        std::vector<double> p(24, 0.0);
        p[0] = 1.0;
        p[12] = 0.05; // 13 dB down
        CHECK(angular_spread(pas_of(p, 15.0), SpreadMode::Omni) == doctest::Approx(0.0));
        p[12] = 0.5;
        CHECK(angular_spread(pas_of(p, 15.0), SpreadMode::Omni) > 80.0);
    }

    TEST_CASE("per-location statistics")
    {
        const auto band = fr1c_band();
        std::vector<double> per(12, 0.0);
        per[0] = 1e-6;
        per[1] = 0.5e-6;
        auto recs = full_circle(band, per, 128, 20);
        for (auto &r : recs)
            r.pdp = r.pdp.with_noise_floor(-120.0);
        const DirectionalCaptureSet set("RX1", Polarization::VV, band, recs);
        const auto st = process_location(set, band.tx_power_dBm());
        CHECK(st.directional_rms_ds_ns.size() == 2);
        CHECK(st.omni_rms_ds_ns == 0.0);
        CHECK(st.omni_pl_dB == doctest::Approx(band.tx_power_dBm() - linear_to_db(1.5e-6)));
        CHECK(st.best_directional_pl_dB == doctest::Approx(band.tx_power_dBm() + 60.0));
        REQUIRE(st.lobe_as_deg.size() == 1);
        CHECK(st.omni_as_deg == doctest::Approx(oracle::circular_spread_scan({0.0, 30.0}, {1.0, 0.5})).epsilon(1e-3));

        auto silent = recs;
        for (auto &r : silent)
            r.pdp = r.pdp.with_powers(std::vector<double>(128, 1e-15));
        CHECK_THROWS_AS(process_location(DirectionalCaptureSet("RX1", Polarization::VV, band, silent),
                                         band.tx_power_dBm()),
                        ComputationError);
    }
}
