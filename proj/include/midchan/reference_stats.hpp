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

#ifndef MIDCHAN_REFERENCE_STATS_HPP
#define MIDCHAN_REFERENCE_STATS_HPP

#include "midchan/core.hpp"
#include "midchan/pathloss.hpp"

#include <span>

// Measured indoor-hotspot summary statistics used as generator targets and exported by the CLI.
// The 28/73/142 GHz rows are comparison values from earlier indoor campaigns.

namespace midchan::reference
{
    struct DelaySpreadMean
    {
        double carrier_GHz;
        pathloss::Aggregation aggregation;
        Environment environment;
        double mean_ns;
    };

    struct AngularSpreadMean
    {
        double carrier_GHz;
        Environment environment;
        double omni_asa_deg;
    };

    // Mean RMS delay spreads. 16.95 GHz directional NLOS is embedded as 14.9 ns; a figure of
    // 17.01 ns is also quoted for the same statistic, see README.
    std::span<const DelaySpreadMean> rms_delay_spread_means();

    double rms_delay_spread_mean(double carrier_GHz, pathloss::Aggregation agg, Environment env);

    // Mean omnidirectional AOA RMS angular spread (6.75 and 16.95 GHz only).
    std::span<const AngularSpreadMean> omni_asa_means();

    double omni_asa_mean(double carrier_GHz, Environment env);

    // Measured cross-polarization discrimination (V-V to V-H), dB.
    double xpd_dB(BandLabel band);

} // namespace midchan::reference

#endif
