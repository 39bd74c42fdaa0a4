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

#include "midchan/campaign.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace midchan::io
{
    using nlohmann::json;
    using ojson = nlohmann::ordered_json;

    std::string_view to_string(CampaignErrc c)
    {
        switch (c)
        {
        case CampaignErrc::Io: return "io";
        case CampaignErrc::Parse: return "parse";
        case CampaignErrc::Schema: return "schema";
        case CampaignErrc::VersionMismatch: return "version-mismatch";
        case CampaignErrc::GridViolation: return "grid-violation";
        case CampaignErrc::DuplicateRecord: return "duplicate-record";
        case CampaignErrc::BandMismatch: return "band-mismatch";
        }
        return "unknown";
    }

    double encode_dBm(double mW)
    {
        const double x0 = linear_to_db(mW);
        if (!std::isfinite(x0) || db_to_linear(x0) == mW)
            return x0;
        double up = x0, down = x0;
        for (int k = 0; k < 16; ++k)
        {
            up = std::nextafter(up, std::numeric_limits<double>::infinity());
            if (db_to_linear(up) == mW)
                return up;
            down = std::nextafter(down, -std::numeric_limits<double>::infinity());
            if (db_to_linear(down) == mW)
                return down;
        }
        return x0;
    }

    namespace
    {
        [[noreturn]] void fail(CampaignErrc code, const std::string &what)
        {
            throw CampaignError(code, what);
        }

        const json &field(const json &obj, const char *key, const std::string &where)
        {
            if (!obj.is_object())
                fail(CampaignErrc::Schema, where + ": expected a JSON object");
            auto it = obj.find(key);
            if (it == obj.end())
                fail(CampaignErrc::Schema, where + ": missing field '" + key + "'");
            return *it;
        }

        double number(const json &obj, const char *key, const std::string &where)
        {
            const json &v = field(obj, key, where);
            if (!v.is_number())
                fail(CampaignErrc::Schema, where + ": field '" + key + "' must be a number");
            const double x = v.get<double>();
            if (!std::isfinite(x))
                fail(CampaignErrc::Schema, where + ": field '" + key + "' must be finite");
            return x;
        }

        // null encodes NaN (unknown).
        double number_or_nan(const json &obj, const char *key, const std::string &where)
        {
            const json &v = field(obj, key, where);
            if (v.is_null())
                return std::numeric_limits<double>::quiet_NaN();
            return number(obj, key, where);
        }

        long integer(const json &obj, const char *key, const std::string &where)
        {
            const json &v = field(obj, key, where);
            if (!v.is_number_integer())
                fail(CampaignErrc::Schema, where + ": field '" + key + "' must be an integer");
            return v.get<long>();
        }

        std::string text(const json &obj, const char *key, const std::string &where)
        {
            const json &v = field(obj, key, where);
            if (!v.is_string())
                fail(CampaignErrc::Schema, where + ": field '" + key + "' must be a string");
            return v.get<std::string>();
        }

        template <class F>
        auto parse_label(F f, const std::string &s, const std::string &where)
        {
            try
            {
                return f(s);
            }
            catch (const ValidationError &e)
            {
                fail(CampaignErrc::Schema, where + ": " + e.what());
            }
        }

        ojson number_json(double x)
        {
            return std::isfinite(x) ? ojson(x) : ojson(nullptr);
        }

        ojson band_json(const FrequencyBand &b)
        {
            ojson j;
            j["label"] = std::string(to_string(b.label));
            j["carrier_GHz"] = b.carrier_GHz;
            j["hpbw_deg"] = b.hpbw_deg;
            j["antenna_gain_dBi"] = b.antenna_gain_dBi;
            j["eirp_dBm"] = b.eirp_dBm;
            j["link_margin_dB"] = b.link_margin_dB;
            return j;
        }

        FrequencyBand parse_band(const json &j, const std::string &where)
        {
            FrequencyBand b;
            b.label = parse_label(parse_band_label, text(j, "label", where), where);
            b.carrier_GHz = number(j, "carrier_GHz", where);
            b.hpbw_deg = number(j, "hpbw_deg", where);
            b.antenna_gain_dBi = number(j, "antenna_gain_dBi", where);
            b.eirp_dBm = number(j, "eirp_dBm", where);
            b.link_margin_dB = number(j, "link_margin_dB", where);
            try
            {
                validate(b);
            }
            catch (const ValidationError &e)
            {
                fail(CampaignErrc::Schema, where + ": " + e.what());
            }
            return b;
        }

        ojson header_json(const CampaignHeader &h)
        {
            ojson j;
            j["kind"] = "header";
            j["format_version"] = h.format_version;
            j["band"] = band_json(h.band);
            j["site"] = h.site;
            j["tx_height_m"] = h.tx_height_m;
            j["rx_height_m"] = h.rx_height_m;
            j["polarization"] = std::string(to_string(h.polarization));
            j["tx_power_dBm"] = h.tx_power_dBm;
            ojson locs = ojson::array();
            for (const auto &l : h.locations)
            {
                ojson lj;
                lj["id"] = l.id;
                lj["distance_m"] = l.distance_m ? ojson(*l.distance_m) : ojson(nullptr);
                lj["environment"] = l.environment ? ojson(std::string(to_string(*l.environment))) : ojson(nullptr);
                locs.push_back(std::move(lj));
            }
            j["locations"] = std::move(locs);
            return j;
        }

        CampaignHeader parse_header(const json &j)
        {
            const std::string where = "header";
            if (text(j, "kind", where) != "header")
                fail(CampaignErrc::Schema, "first line must be the campaign header");
            CampaignHeader h;
            h.format_version = static_cast<int>(integer(j, "format_version", where));
            if (h.format_version != kFormatVersion)
                fail(CampaignErrc::VersionMismatch, "unsupported campaign format_version " +
                                                        std::to_string(h.format_version) + " (expected " +
                                                        std::to_string(kFormatVersion) + ")");
            h.band = parse_band(field(j, "band", where), "header.band");
            h.site = text(j, "site", where);
            h.tx_height_m = number(j, "tx_height_m", where);
            h.rx_height_m = number(j, "rx_height_m", where);
            h.polarization = parse_label(parse_polarization, text(j, "polarization", where), where);
            h.tx_power_dBm = number(j, "tx_power_dBm", where);
            const json &locs = field(j, "locations", where);
            if (!locs.is_array())
                fail(CampaignErrc::Schema, "header: 'locations' must be an array");
            for (const auto &lj : locs)
            {
                LocationInfo l;
                l.id = text(lj, "id", "header.locations");
                const double d = number_or_nan(lj, "distance_m", "header.locations");
                if (!std::isnan(d))
                    l.distance_m = d;
                const json &env = field(lj, "environment", "header.locations");
                if (!env.is_null())
                    l.environment = parse_label(parse_environment, text(lj, "environment", "header.locations"), "header.locations");
                h.locations.push_back(std::move(l));
            }
            return h;
        }

        ojson record_json(const measproc::MeasurementRecord &r)
        {
            ojson j;
            j["kind"] = "record";
            j["location_id"] = r.location_id;
            j["band"] = std::string(to_string(r.band));
            j["polarization"] = std::string(to_string(r.polarization));
            j["tx_azimuth_deg"] = r.tx_azimuth.degrees();
            j["tx_tilt"] = r.tx_tilt;
            j["rx_azimuth_deg"] = r.rx_azimuth.degrees();
            j["rx_tilt"] = r.rx_tilt;
            j["tx_gain_dBi"] = r.tx_gain_dBi;
            j["rx_gain_dBi"] = r.rx_gain_dBi;
            j["wall_time_s"] = r.wall_time_s;
            ojson pdp;
            pdp["start_delay_ns"] = r.pdp.start_delay_ns();
            pdp["bin_width_ns"] = r.pdp.bin_width_ns();
            pdp["noise_floor_dBm"] = number_json(r.pdp.noise_floor_dBm());
            ojson powers = ojson::array();
            for (double p : r.pdp.powers_mW())
                powers.push_back(p > 0.0 ? ojson(encode_dBm(p)) : ojson(nullptr));
            pdp["powers_dBm"] = std::move(powers);
            j["pdp"] = std::move(pdp);
            return j;
        }

        measproc::MeasurementRecord parse_record(const json &j, const std::string &where)
        {
            measproc::MeasurementRecord r;
            r.location_id = text(j, "location_id", where);
            r.band = parse_label(parse_band_label, text(j, "band", where), where);
            r.polarization = parse_label(parse_polarization, text(j, "polarization", where), where);
            r.tx_azimuth = wrap_azimuth(number(j, "tx_azimuth_deg", where));
            r.tx_tilt = static_cast<int>(integer(j, "tx_tilt", where));
            r.rx_azimuth = wrap_azimuth(number(j, "rx_azimuth_deg", where));
            r.rx_tilt = static_cast<int>(integer(j, "rx_tilt", where));
            r.tx_gain_dBi = number(j, "tx_gain_dBi", where);
            r.rx_gain_dBi = number(j, "rx_gain_dBi", where);
            r.wall_time_s = number(j, "wall_time_s", where);

            const json &pj = field(j, "pdp", where);
            const std::string pw = where + ".pdp";
            const double start = number(pj, "start_delay_ns", pw);
            if (start < 0.0)
                fail(CampaignErrc::Schema, pw + ": start_delay_ns must be non-negative");
            const json &arr = field(pj, "powers_dBm", pw);
            if (!arr.is_array())
                fail(CampaignErrc::Schema, pw + ": powers_dBm must be an array");
            std::vector<double> mw;
            mw.reserve(arr.size());
            for (const auto &v : arr)
            {
                if (v.is_null())
                    mw.push_back(0.0);
                else if (v.is_number() && std::isfinite(v.get<double>()))
                    mw.push_back(db_to_linear(v.get<double>()));
                else
                    fail(CampaignErrc::Schema, pw + ": powers_dBm entries must be numbers or null");
            }
            try
            {
                r.pdp = PowerDelayProfile(start, number(pj, "bin_width_ns", pw), std::move(mw),
                                          number_or_nan(pj, "noise_floor_dBm", pw));
            }
            catch (const ValidationError &e)
            {
                fail(CampaignErrc::Schema, pw + ": " + e.what());
            }
            return r;
        }

        ojson footer_json(const std::vector<CalibrationEntry> &cal)
        {
            ojson j;
            j["kind"] = "footer";
            ojson arr = ojson::array();
            for (const auto &c : cal)
            {
                ojson cj;
                cj["location_id"] = c.location_id;
                cj["system_gain_dB"] = c.system_gain_dB;
                cj["time_shift_bins"] = c.time_shift_bins;
                ojson rec = ojson::array();
                for (const auto &r : c.recaptures)
                    rec.push_back({{"wall_time_s", r.wall_time_s}, {"observed_displacement_ns", r.observed_displacement_ns}});
                cj["recaptures"] = std::move(rec);
                arr.push_back(std::move(cj));
            }
            j["calibration"] = std::move(arr);
            return j;
        }

        std::vector<CalibrationEntry> parse_footer(const json &j)
        {
            const std::string where = "footer";
            const json &arr = field(j, "calibration", where);
            if (!arr.is_array())
                fail(CampaignErrc::Schema, "footer: 'calibration' must be an array");
            std::vector<CalibrationEntry> out;
            for (const auto &cj : arr)
            {
                CalibrationEntry c;
                c.location_id = text(cj, "location_id", where);
                c.system_gain_dB = number(cj, "system_gain_dB", where);
                c.time_shift_bins = integer(cj, "time_shift_bins", where);
                const json &rec = field(cj, "recaptures", where);
                if (!rec.is_array())
                    fail(CampaignErrc::Schema, "footer: 'recaptures' must be an array");
                for (const auto &rj : rec)
                    c.recaptures.push_back({number(rj, "wall_time_s", where), number(rj, "observed_displacement_ns", where)});
                out.push_back(std::move(c));
            }
            return out;
        }

        bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

        bool same_pdp(const PowerDelayProfile &a, const PowerDelayProfile &b)
        {
            if (a.start_delay_ns() != b.start_delay_ns() || a.bin_width_ns() != b.bin_width_ns() ||
                !same_number(a.noise_floor_dBm(), b.noise_floor_dBm()) || a.size() != b.size())
                return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a.power_mW(i) != b.power_mW(i))
                    return false;
            return true;
        }
    } // namespace

    const LocationInfo *CampaignFile::location(const std::string &id) const noexcept
    {
        for (const auto &l : header.locations)
            if (l.id == id)
                return &l;
        return nullptr;
    }

    std::vector<measproc::DirectionalCaptureSet> CampaignFile::capture_sets() const
    {
        std::vector<std::string> order;
        std::map<std::string, std::vector<measproc::MeasurementRecord>> groups;
        for (const auto &r : records)
        {
            auto [it, fresh] = groups.try_emplace(r.location_id);
            if (fresh)
                order.push_back(r.location_id);
            it->second.push_back(r);
        }
        std::vector<measproc::DirectionalCaptureSet> out;
        for (const auto &id : order)
            out.emplace_back(id, header.polarization, header.band, std::move(groups[id]));
        return out;
    }

    bool equivalent(const CampaignFile &a, const CampaignFile &b)
    {
        if (!(a.header == b.header) || !(a.calibration == b.calibration) || a.records.size() != b.records.size())
            return false;
        for (std::size_t i = 0; i < a.records.size(); ++i)
        {
            const auto &x = a.records[i];
            const auto &y = b.records[i];
            if (x.location_id != y.location_id || x.band != y.band || x.polarization != y.polarization ||
                !(x.tx_azimuth == y.tx_azimuth) || !(x.rx_azimuth == y.rx_azimuth) || x.tx_tilt != y.tx_tilt ||
                x.rx_tilt != y.rx_tilt || x.tx_gain_dBi != y.tx_gain_dBi || x.rx_gain_dBi != y.rx_gain_dBi ||
                x.wall_time_s != y.wall_time_s || !same_pdp(x.pdp, y.pdp))
                return false;
        }
        return true;
    }

    void validate(const CampaignFile &c)
    {
        const auto &h = c.header;
        if (h.format_version != kFormatVersion)
            fail(CampaignErrc::VersionMismatch, "unsupported campaign format_version " + std::to_string(h.format_version));
        try
        {
            validate(h.band);
        }
        catch (const ValidationError &e)
        {
            fail(CampaignErrc::Schema, std::string("header band: ") + e.what());
        }
        if (!h.band.sweepable())
            fail(CampaignErrc::Schema, "header band HPBW must divide 360 deg");
        std::set<std::string> ids;
        for (const auto &l : h.locations)
        {
            if (!ids.insert(l.id).second)
                fail(CampaignErrc::Schema, "duplicate location '" + l.id + "' in header");
            if (l.distance_m && !(*l.distance_m > 0.0))
                fail(CampaignErrc::Schema, "location '" + l.id + "': distance must be positive");
        }

        std::set<std::tuple<std::string, measproc::CellKey>> seen;
        for (std::size_t i = 0; i < c.records.size(); ++i)
        {
            const auto &r = c.records[i];
            const std::string where = "record " + std::to_string(i + 1);
            if (!ids.contains(r.location_id))
                fail(CampaignErrc::Schema, where + ": location '" + r.location_id + "' is not declared in the header");
            if (r.band != h.band.label)
                fail(CampaignErrc::BandMismatch, where + ": band " + std::string(to_string(r.band)) +
                                                     " does not match campaign band " + std::string(to_string(h.band.label)));
            if (r.polarization != h.polarization)
                fail(CampaignErrc::Schema, where + ": polarization does not match the campaign header");
            if (r.pdp.start_delay_ns() < 0.0)
                fail(CampaignErrc::Schema, where + ": negative PDP start delay");
            measproc::CellKey key;
            try
            {
                key = measproc::cell_key(r, h.band.hpbw_deg);
            }
            catch (const ValidationError &e)
            {
                fail(CampaignErrc::GridViolation, where + ": " + e.what());
            }
            if (!seen.emplace(r.location_id, key).second)
                fail(CampaignErrc::DuplicateRecord, where + ": duplicate pointing cell at location '" + r.location_id + "'");
        }
        for (const auto &cal : c.calibration)
            if (!ids.contains(cal.location_id))
                fail(CampaignErrc::Schema, "calibration entry for undeclared location '" + cal.location_id + "'");
    }

    CampaignFile parse_campaign(std::istream &in)
    {
        CampaignFile c;
        bool have_header = false, have_footer = false;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            const std::string where = "line " + std::to_string(lineno);
            if (have_footer)
                fail(CampaignErrc::Schema, where + ": content after the footer");
            json j;
            try
            {
                j = json::parse(line);
            }
            catch (const json::parse_error &e)
            {
                fail(CampaignErrc::Parse, where + ": " + e.what());
            }
            if (!have_header)
            {
                c.header = parse_header(j);
                have_header = true;
                continue;
            }
            const std::string kind = text(j, "kind", where);
            if (kind == "record")
                c.records.push_back(parse_record(j, where));
            else if (kind == "footer")
            {
                c.calibration = parse_footer(j);
                have_footer = true;
            }
            else
                fail(CampaignErrc::Schema, where + ": unknown line kind '" + kind + "'");
        }
        if (!have_header)
            fail(CampaignErrc::Schema, "campaign file is empty");
        if (!have_footer)
            fail(CampaignErrc::Schema, "campaign file has no footer (truncated?)");
        validate(c);
        return c;
    }

    CampaignFile load_campaign(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(CampaignErrc::Io, "cannot open campaign file '" + path.string() + "'");
        return parse_campaign(in);
    }

    void write_campaign(const CampaignFile &c, std::ostream &out)
    {
        out << header_json(c.header).dump() << '\n';
        for (const auto &r : c.records)
            out << record_json(r).dump() << '\n';
        out << footer_json(c.calibration).dump() << '\n';
    }

    std::string serialize_campaign(const CampaignFile &c)
    {
        std::ostringstream os;
        write_campaign(c, os);
        return os.str();
    }

    void write_file_atomic(const std::filesystem::path &path, const std::string &text)
    {
        namespace fs = std::filesystem;
        const fs::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                fail(CampaignErrc::Io, "cannot write '" + tmp.string() + "'");
            out << text;
            out.flush();
            if (!out)
                fail(CampaignErrc::Io, "write to '" + tmp.string() + "' failed");
        }
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec)
        {
            fs::remove(tmp, ec);
            fail(CampaignErrc::Io, "cannot move output into place at '" + path.string() + "'");
        }
    }

    void save_campaign(const CampaignFile &c, const std::filesystem::path &path)
    {
        validate(c);
        write_file_atomic(path, serialize_campaign(c));
    }

} // namespace midchan::io
