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

// Random campaign builder shared by the file-format tests and the acceptance checks.

#ifndef MIDCHAN_TESTS_FIXTURES_HPP
#define MIDCHAN_TESTS_FIXTURES_HPP

#include "midchan/campaign.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace fixture
{
    // A valid campaign with 1-3 locations. Every location covers the full RX azimuth circle at
    // TX azimuth 0 (so statistics can be computed) plus random extra pointing cells. Powers are
    // arbitrary doubles; a quarter of the bins carry no power.
    inline midchan::io::CampaignFile random_campaign(std::mt19937_64 &rng)
    {
        using namespace midchan;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> nloc(1, 3), nbins(16, 80), extra(0, 20), tilt(-1, 1);

        io::CampaignFile c;
        c.header.band = u(rng) < 0.5 ? fr1c_band() : fr3_band();
        c.header.site = "site-" + std::to_string(rng() % 1000);
        c.header.polarization = u(rng) < 0.8 ? Polarization::VV : Polarization::VH;
        c.header.tx_power_dBm = -10.0 + 30.0 * u(rng);
        c.header.tx_height_m = 2.4;
        c.header.rx_height_m = 1.5;

        const auto &band = c.header.band;
        const int steps = band.azimuth_steps();
        const int locations = nloc(rng);
        double clock = 0.0;
        for (int l = 0; l < locations; ++l)
        {
            io::LocationInfo info;
            info.id = "RX" + std::to_string(l + 1);
            if (u(rng) < 0.8)
                info.distance_m = 11.0 + 86.0 * u(rng);
            if (u(rng) < 0.8)
                info.environment = u(rng) < 0.5 ? Environment::LOS : Environment::NLOS;
            c.header.locations.push_back(info);

            const std::size_t bins = static_cast<std::size_t>(nbins(rng));
            const double start = std::floor(200.0 * u(rng));
            const double bin = u(rng) < 0.5 ? 1.0 : 0.5;
            const double floor = -120.0 + 30.0 * u(rng);

            std::set<std::tuple<int, int, int, int>> used;
            std::vector<std::tuple<int, int, int, int>> cells;
            for (int a = 0; a < steps; ++a)
                cells.emplace_back(0, 0, a, 0);
            for (int k = 0, n = extra(rng); k < n; ++k)
                cells.emplace_back(static_cast<int>(u(rng) * steps), tilt(rng) == 1 ? -1 : 0,
                                   static_cast<int>(u(rng) * steps), tilt(rng));
            for (const auto &cell : cells)
            {
                if (!used.insert(cell).second)
                    continue;
                const auto [txa, txt, rxa, rxt] = cell;
                measproc::MeasurementRecord r;
                r.location_id = info.id;
                r.band = band.label;
                r.polarization = c.header.polarization;
                r.tx_azimuth = wrap_azimuth(txa * band.hpbw_deg);
                r.tx_tilt = txt;
                r.rx_azimuth = wrap_azimuth(rxa * band.hpbw_deg);
                r.rx_tilt = rxt;
                r.tx_gain_dBi = band.antenna_gain_dBi;
                r.rx_gain_dBi = band.antenna_gain_dBi;
                r.wall_time_s = (clock += 1.0 + 10.0 * u(rng));
                std::vector<double> p(bins);
                for (double &x : p)
                    x = u(rng) < 0.25 ? 0.0 : db_to_linear(floor - 10.0 + 90.0 * u(rng)) * (1.0 + u(rng));
                p[static_cast<std::size_t>(u(rng) * static_cast<double>(bins))] = db_to_linear(floor + 40.0);
                r.pdp = PowerDelayProfile(start, bin, std::move(p), floor);
                c.records.push_back(std::move(r));
            }

            io::CalibrationEntry cal;
            cal.location_id = info.id;
            cal.system_gain_dB = -5.0 + 10.0 * u(rng);
            cal.time_shift_bins = static_cast<long>(u(rng) * 100.0) - 50;
            for (int k = 0, n = extra(rng) % 6; k < n; ++k)
                cal.recaptures.push_back({1000.0 * u(rng), 20.0 * (u(rng) - 0.5)});
            c.calibration.push_back(std::move(cal));
        }
        return c;
    }
} // namespace fixture

#endif
