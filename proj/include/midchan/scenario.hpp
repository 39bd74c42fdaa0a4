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

#ifndef MIDCHAN_SCENARIO_HPP
#define MIDCHAN_SCENARIO_HPP

#include "midchan/campaign.hpp"
#include "midchan/changen.hpp"
#include "midchan/sounder.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// End-to-end sounder campaign simulation for one RX location: free-space power and time
// calibration, AOD selection from a rapid scan, the five RX sweeps per selected AOD with a
// reference-MPC recapture after each sweep, clock drift and its correction.
//
// Antennas are ideal sectors: full gain inside the HPBW cell a path falls into, nothing outside.

namespace midchan::scenario
{
    struct ScenarioPath
    {
        double delay_ns = 0.0;     // true propagation delay
        double path_gain_dB = 0.0; // isotropic power gain (negative path loss)
        double phase_rad = 0.0;
        double aod_deg = 0.0;
        double aoa_deg = 0.0;
        int tx_tilt = 0; // elevation cell, HPBW units
        int rx_tilt = 0;
    };

    struct ScenarioConfig
    {
        BandLabel band = BandLabel::FR3;
        std::uint64_t seed = 1;
        std::string location_id = "RX1";
        std::optional<double> distance_m;
        std::optional<Environment> environment;
        Polarization polarization = Polarization::VV;
        std::optional<double> tx_power_dBm; // defaults to EIRP minus antenna gain
        double snr_dB = 30.0;               // strongest path, at the chip-rate bandwidth
        int pn_order = 11;
        int averaging = 20; // PDPs averaged per capture
        sounder::CorrelatorConfig correlator;
        sounder::ClockModel clock;
        double rx_gain_error_dB = 0.0; // unknown receiver gain offset, removed by calibration
        double step_duration_s = 2.0;  // wall time per capture
        std::vector<ScenarioPath> paths;
    };

    // Throws ValidationError for malformed JSON or invalid values.
    ScenarioConfig parse_scenario(const std::string &json_text);
    void validate(const ScenarioConfig &cfg);

    struct ScenarioResult
    {
        io::CampaignFile campaign;
        std::vector<changen::AodPeak> rapid_scan;
        std::vector<changen::AodPeak> selected_aods;
        sounder::PowerCalibration power_calibration;
        sounder::TimeCalibration time_calibration;
        std::vector<sounder::CaptureEvent> events; // drift-corrected, in schedule order
        std::vector<double> true_offsets_ns;       // clock offset at each event
        sounder::DriftReport drift;
    };

    ScenarioResult simulate(const ScenarioConfig &cfg);

} // namespace midchan::scenario

#endif
