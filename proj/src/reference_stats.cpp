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

#include "midchan/reference_stats.hpp"

#include <array>
#include <cmath>
#include <string>

namespace midchan::reference
{
    namespace
    {
        using enum Environment;
        constexpr auto Dir = pathloss::Aggregation::Directional;
        constexpr auto Omni = pathloss::Aggregation::Omni;

        // clang-format off
        const std::array<DelaySpreadMean, 20> kDelaySpread = {{
            {6.75,  Dir, LOS, 19.3}, {6.75,  Dir, NLOS, 21.7}, {6.75,  Omni, LOS, 33.7}, {6.75,  Omni, NLOS, 43.5},
            {16.95, Dir, LOS, 19.5}, {16.95, Dir, NLOS, 14.9}, {16.95, Omni, LOS, 22.1}, {16.95, Omni, NLOS, 40.7},
            {28.0,  Dir, LOS,  3.9}, {28.0,  Dir, NLOS, 14.5}, {28.0,  Omni, LOS, 10.8}, {28.0,  Omni, NLOS, 17.1},
            {73.0,  Dir, LOS,  3.5}, {73.0,  Dir, NLOS, 10.0}, {73.0,  Omni, LOS,  6.2}, {73.0,  Omni, NLOS, 12.3},
            {142.0, Dir, LOS,  2.7}, {142.0, Dir, NLOS,  7.2}, {142.0, Omni, LOS,  3.0}, {142.0, Omni, NLOS,  9.2},
        }};

        const std::array<AngularSpreadMean, 4> kAsa = {{
            {6.75, LOS, 34.0}, {6.75, NLOS, 58.0}, {16.95, LOS, 18.0}, {16.95, NLOS, 43.0},
        }};
        // clang-format on

        bool same_freq(double a, double b) { return std::abs(a - b) < 1e-6; }
    } // namespace

    std::span<const DelaySpreadMean> rms_delay_spread_means()
    {
        return kDelaySpread;
    }

    double rms_delay_spread_mean(double carrier_GHz, pathloss::Aggregation agg, Environment env)
    {
        for (const auto &e : kDelaySpread)
            if (same_freq(e.carrier_GHz, carrier_GHz) && e.aggregation == agg && e.environment == env)
                return e.mean_ns;
        throw ValidationError("no RMS delay spread reference for " + std::to_string(carrier_GHz) + " GHz " +
                              std::string(to_string(env)));
    }

    std::span<const AngularSpreadMean> omni_asa_means()
    {
        return kAsa;
    }

    double omni_asa_mean(double carrier_GHz, Environment env)
    {
        for (const auto &e : kAsa)
            if (same_freq(e.carrier_GHz, carrier_GHz) && e.environment == env)
                return e.omni_asa_deg;
        throw ValidationError("no omni ASA reference for " + std::to_string(carrier_GHz) + " GHz " +
                              std::string(to_string(env)));
    }

    double xpd_dB(BandLabel band)
    {
        switch (band)
        {
        case BandLabel::FR1C:
            return 35.7;
        case BandLabel::FR3:
            return 38.4;
        default:
            throw ValidationError("no XPD measurement for the reference band");
        }
    }

} // namespace midchan::reference
