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

#ifndef MIDCHAN_CAMPAIGN_HPP
#define MIDCHAN_CAMPAIGN_HPP

#include "midchan/core.hpp"
#include "midchan/measproc.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Campaign files: line-delimited JSON. The first line is a header, then one line per directional
// capture, then a footer carrying the calibration log.
//
//   {"kind":"header","format_version":1,"band":{...},"site":...,"tx_height_m":2.4,...}
//   {"kind":"record","location_id":"RX1","tx_azimuth_deg":0,...,"pdp":{"powers_dBm":[...]}}
//   {"kind":"footer","calibration":[{"location_id":"RX1","system_gain_dB":...}]}
//
// PDP powers are written in dBm (null for zero power) and converted back to mW on load. The dBm
// text is chosen so that converting it back reproduces a loaded power bit for bit; saving a loaded
// campaign therefore reproduces the file exactly.

namespace midchan::io
{
    inline constexpr int kFormatVersion = 1;

    enum class CampaignErrc
    {
        Io,
        Parse,
        Schema,
        VersionMismatch,
        GridViolation,
        DuplicateRecord,
        BandMismatch
    };

    std::string_view to_string(CampaignErrc c);

    class CampaignError : public ValidationError
    {
    public:
        CampaignError(CampaignErrc code, const std::string &what) : ValidationError(what), code_(code) {}
        CampaignErrc code() const noexcept { return code_; }

    private:
        CampaignErrc code_;
    };

    struct LocationInfo
    {
        std::string id;
        std::optional<double> distance_m; // T-R separation
        std::optional<Environment> environment;
        friend bool operator==(const LocationInfo &, const LocationInfo &) = default;
    };

    struct CampaignHeader
    {
        int format_version = kFormatVersion;
        FrequencyBand band = fr3_band();
        std::string site;
        double tx_height_m = 2.4;
        double rx_height_m = 1.5;
        Polarization polarization = Polarization::VV;
        double tx_power_dBm = 0.0;
        std::vector<LocationInfo> locations;
        friend bool operator==(const CampaignHeader &, const CampaignHeader &) = default;
    };

    struct Recapture
    {
        double wall_time_s = 0.0;
        double observed_displacement_ns = 0.0;
        friend bool operator==(const Recapture &, const Recapture &) = default;
    };

    struct CalibrationEntry
    {
        std::string location_id;
        double system_gain_dB = 0.0;
        long time_shift_bins = 0;
        std::vector<Recapture> recaptures;
        friend bool operator==(const CalibrationEntry &, const CalibrationEntry &) = default;
    };

    struct CampaignFile
    {
        CampaignHeader header;
        std::vector<measproc::MeasurementRecord> records;
        std::vector<CalibrationEntry> calibration;

        // Records grouped by location, in order of first appearance.
        std::vector<measproc::DirectionalCaptureSet> capture_sets() const;
        const LocationInfo *location(const std::string &id) const noexcept;
    };

    // Field-wise equality; NaN noise floors compare equal to each other.
    bool equivalent(const CampaignFile &a, const CampaignFile &b);

    // Throws CampaignError on version, grid, duplicate or band violations.
    void validate(const CampaignFile &c);

    CampaignFile parse_campaign(std::istream &in);
    CampaignFile load_campaign(const std::filesystem::path &path);

    std::string serialize_campaign(const CampaignFile &c);
    void write_campaign(const CampaignFile &c, std::ostream &out);

    // Validates, then writes via a temporary file renamed into place.
    void save_campaign(const CampaignFile &c, const std::filesystem::path &path);

    // Writes text atomically (temporary file, then rename).
    void write_file_atomic(const std::filesystem::path &path, const std::string &text);

    // dBm text value whose conversion back to mW reproduces `mW` exactly when possible.
    double encode_dBm(double mW);

} // namespace midchan::io

#endif
