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

#ifndef MIDCHAN_REPORT_HPP
#define MIDCHAN_REPORT_HPP

#include "midchan/campaign.hpp"
#include "midchan/changen.hpp"
#include "midchan/measproc.hpp"
#include "midchan/pathloss.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Campaign-level statistics and the text exports (JSON / CSV) used by the command-line tool.

namespace midchan::report
{
    struct CiFitEntry
    {
        std::string label; // e.g. "omni NLOS"
        std::size_t samples = 0;
        pathloss::CIParams params;
    };

    struct StatsReport
    {
        io::CampaignHeader header;
        std::vector<measproc::ChannelStats> locations;
        std::vector<CiFitEntry> fits;
        std::map<std::string, std::map<std::string, changen::StatSummary>> ensemble; // by environment
    };

    // Processes every location and fits the close-in model where the header gives distances:
    // omni LOS/NLOS, directional LOS (best beam), NLOS_Best (best beam) and NLOS (every beam).
    StatsReport build_stats_report(const io::CampaignFile &campaign);

    // Deterministic pretty-printed JSON, including a provenance block with the processing rules.
    std::string to_json(const StatsReport &r);

    // delay_ns,power_dBm rows; zero-power bins are written as empty power cells.
    std::string pdp_csv(const PowerDelayProfile &pdp);

    // azimuth_deg,power_dBm rows.
    std::string pas_csv(const measproc::PowerAngularSpectrum &pas);

    std::string sweep_plan_json(const changen::SweepPlan &plan);
    std::string sweep_plan_csv(const changen::SweepPlan &plan);

    // Close-in parameters, delay / angular spread means and XPD. With all three selectors given
    // only {"n":..,"sigma_dB":..} is returned.
    std::string params_json(std::optional<double> carrier_GHz, std::optional<Environment> env,
                            std::optional<pathloss::Aggregation> agg);

    std::string ci_fit_json(const pathloss::CIParams &p, std::size_t samples);

    // Per-drop targets and realized statistics plus the ensemble summary.
    std::string drops_json(std::span<const changen::SyntheticDrop> drops, bool include_cdf);

    // A campaign holding every drop as one location (distance and environment recorded).
    io::CampaignFile campaign_from_drops(std::span<const changen::SyntheticDrop> drops, const std::string &site);

    // Shortest round-trip decimal text of a double ("nan", "inf" for non-finite values).
    std::string format_number(double x);

} // namespace midchan::report

#endif
