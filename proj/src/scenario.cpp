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

#include "midchan/scenario.hpp"

#include "midchan/pathloss.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace midchan::scenario
{
    using nlohmann::json;

    namespace
    {
        void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where)
        {
            if (!j.is_object())
                throw ValidationError("scenario: " + where + " must be a JSON object");
            for (auto it = j.begin(); it != j.end(); ++it)
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char *k) { return it.key() == k; }))
                    throw ValidationError("scenario: unknown field '" + it.key() + "' in " + where);
        }

        template <class T>
        void read(const json &j, const char *key, T &out)
        {
            if (auto it = j.find(key); it != j.end())
            {
                try
                {
                    out = it->get<T>();
                }
                catch (const json::exception &)
                {
                    throw ValidationError(std::string("scenario: field '") + key + "' has the wrong type");
                }
            }
        }

        template <class T>
        void read_opt(const json &j, const char *key, std::optional<T> &out)
        {
            if (auto it = j.find(key); it != j.end() && !it->is_null())
            {
                T v{};
                read(j, key, v);
                out = v;
            }
        }

        int cell_of(double azimuth_deg, double step_deg, int cells)
        {
            return static_cast<int>(std::lround(wrap_azimuth(azimuth_deg).degrees() / step_deg)) % cells;
        }

        struct Pointing
        {
            int tx_cell = 0;
            int tx_tilt = 0;
            int rx_cell = 0;
            int rx_tilt = 0;
        };
    } // namespace

    ScenarioConfig parse_scenario(const std::string &json_text)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ValidationError(std::string("scenario: malformed JSON: ") + e.what());
        }
        check_keys(j,
                   {"band", "seed", "location_id", "distance_m", "environment", "polarization", "tx_power_dBm",
                    "snr_dB", "pn_order", "averaging", "correlator", "clock", "rx_gain_error_dB", "step_duration_s",
                    "paths"},
                   "scenario");
        ScenarioConfig c;
        std::string s;
        if (read(j, "band", s), !s.empty())
            c.band = parse_band_label(s);
        read(j, "seed", c.seed);
        read(j, "location_id", c.location_id);
        read_opt(j, "distance_m", c.distance_m);
        if (auto it = j.find("environment"); it != j.end() && !it->is_null())
        {
            std::string e;
            read(j, "environment", e);
            c.environment = parse_environment(e);
        }
        s.clear();
        if (read(j, "polarization", s), !s.empty())
            c.polarization = parse_polarization(s);
        read_opt(j, "tx_power_dBm", c.tx_power_dBm);
        read(j, "snr_dB", c.snr_dB);
        read(j, "pn_order", c.pn_order);
        read(j, "averaging", c.averaging);
        read(j, "rx_gain_error_dB", c.rx_gain_error_dB);
        read(j, "step_duration_s", c.step_duration_s);
        if (auto it = j.find("correlator"); it != j.end())
        {
            check_keys(*it, {"fast_rate_Mcps", "slow_rate_Mcps"}, "correlator");
            read(*it, "fast_rate_Mcps", c.correlator.fast_rate_Mcps);
            read(*it, "slow_rate_Mcps", c.correlator.slow_rate_Mcps);
        }
        if (auto it = j.find("clock"); it != j.end())
        {
            check_keys(*it, {"frequency_offset_ppt", "initial_phase_offset_ns", "jitter_ns_per_sqrt_s"}, "clock");
            read(*it, "frequency_offset_ppt", c.clock.frequency_offset_ppt);
            read(*it, "initial_phase_offset_ns", c.clock.initial_phase_offset_ns);
            read(*it, "jitter_ns_per_sqrt_s", c.clock.jitter_ns_per_sqrt_s);
        }
        if (auto it = j.find("paths"); it != j.end())
        {
            if (!it->is_array())
                throw ValidationError("scenario: 'paths' must be an array");
            for (const auto &pj : *it)
            {
                check_keys(pj, {"delay_ns", "path_gain_dB", "phase_rad", "aod_deg", "aoa_deg", "tx_tilt", "rx_tilt"},
                           "path");
                ScenarioPath p;
                read(pj, "delay_ns", p.delay_ns);
                read(pj, "path_gain_dB", p.path_gain_dB);
                read(pj, "phase_rad", p.phase_rad);
                read(pj, "aod_deg", p.aod_deg);
                read(pj, "aoa_deg", p.aoa_deg);
                read(pj, "tx_tilt", p.tx_tilt);
                read(pj, "rx_tilt", p.rx_tilt);
                c.paths.push_back(p);
            }
        }
        validate(c);
        return c;
    }

    void validate(const ScenarioConfig &c)
    {
        if (c.band == BandLabel::Reference)
            throw ValidationError("scenario: band must be FR1C or FR3");
        if (c.location_id.empty())
            throw ValidationError("scenario: location_id must not be empty");
        if (c.distance_m && !(*c.distance_m > 0.0))
            throw ValidationError("scenario: distance_m must be positive");
        if (c.pn_order < 2 || c.pn_order > 20)
            throw ValidationError("scenario: pn_order must be in [2, 20]");
        if (c.averaging < 1)
            throw ValidationError("scenario: averaging must be at least 1");
        if (!std::isfinite(c.snr_dB))
            throw ValidationError("scenario: snr_dB must be finite");
        if (!(c.step_duration_s > 0.0) || !std::isfinite(c.step_duration_s))
            throw ValidationError("scenario: step_duration_s must be positive");
        if (!std::isfinite(c.rx_gain_error_dB) || (c.tx_power_dBm && !std::isfinite(*c.tx_power_dBm)))
            throw ValidationError("scenario: gains and powers must be finite");
        if (!std::isfinite(c.clock.frequency_offset_ppt) || !std::isfinite(c.clock.initial_phase_offset_ns) ||
            !(c.clock.jitter_ns_per_sqrt_s >= 0.0))
            throw ValidationError("scenario: invalid clock model");
        sounder::dilation_factor(c.correlator);
        if (c.paths.empty())
            throw ValidationError("scenario: at least one path is required");
        for (const auto &p : c.paths)
        {
            if (!(p.delay_ns >= 0.0) || !std::isfinite(p.delay_ns) || !std::isfinite(p.path_gain_dB) ||
                !std::isfinite(p.aod_deg) || !std::isfinite(p.aoa_deg) || !std::isfinite(p.phase_rad))
                throw ValidationError("scenario: path values must be finite with non-negative delay");
            if ((p.tx_tilt != 0 && p.tx_tilt != -1) || p.rx_tilt < -1 || p.rx_tilt > 1)
                throw ValidationError("scenario: path tilts must be swept cells (tx 0/-1, rx -1/0/+1)");
        }
    }

    ScenarioResult simulate(const ScenarioConfig &cfg)
    {
        validate(cfg);
        const FrequencyBand band = band_by_label(cfg.band);
        const int cells = band.azimuth_steps();
        const double step = band.hpbw_deg;
        const double g = band.antenna_gain_dBi;
        const double tx_dBm = cfg.tx_power_dBm.value_or(band.tx_power_dBm());
        const auto taps_order = sounder::default_taps(cfg.pn_order);
        const auto pn = sounder::gen_pn(cfg.pn_order, taps_order, cfg.correlator.fast_rate_Mcps);
        const std::size_t period = pn.length() * sounder::kSamplesPerChip;
        std::mt19937_64 rng(cfg.seed);

        double strongest_dB = -std::numeric_limits<double>::infinity();
        std::size_t ref_path = 0;
        for (std::size_t i = 0; i < cfg.paths.size(); ++i)
            if (cfg.paths[i].path_gain_dB > strongest_dB)
            {
                strongest_dB = cfg.paths[i].path_gain_dB;
                ref_path = i;
            }
        // Receiver noise sits ahead of the gain error, so both are scaled by it.
        const double noise_var = sounder::kSamplesPerChip *
                                 db_to_linear(tx_dBm + strongest_dB + 2.0 * g + cfg.rx_gain_error_dB) /
                                 db_to_linear(cfg.snr_dB);
        const double floor_dBm = linear_to_db(noise_var / static_cast<double>(period));

        auto capture = [&](const std::vector<sounder::ChannelTap> &taps) {
            sounder::RxCapture rx;
            if (taps.empty())
                rx = sounder::noise_capture(pn, noise_var, rng, cfg.averaging);
            else
            {
                rx = sounder::channel_convolve(pn, taps, std::numeric_limits<double>::infinity(), rng,
                                               {tx_dBm, cfg.averaging});
                const auto noise = sounder::noise_capture(pn, noise_var, rng, cfg.averaging);
                for (std::size_t k = 0; k < rx.samples.size(); ++k)
                    rx.samples[k] += noise.samples[k];
                rx.noise_power_mW = noise_var;
            }
            return sounder::undilate(sounder::sliding_correlate(rx, pn, cfg.correlator), cfg.correlator);
        };
        auto wrap_delay = [&](double d) {
            const double span = static_cast<double>(period) * 1000.0 / (cfg.correlator.fast_rate_Mcps * sounder::kSamplesPerChip);
            return d - span * std::floor(d / span);
        };
        auto taps_for = [&](const Pointing &pt, double offset_ns) {
            std::vector<sounder::ChannelTap> taps;
            for (const auto &p : cfg.paths)
                if (cell_of(p.aod_deg, step, cells) == pt.tx_cell && cell_of(p.aoa_deg, step, cells) == pt.rx_cell &&
                    p.tx_tilt == pt.tx_tilt && p.rx_tilt == pt.rx_tilt)
                    taps.push_back({wrap_delay(p.delay_ns + offset_ns), p.path_gain_dB + 2.0 * g + cfg.rx_gain_error_dB,
                                    p.phase_rad});
            return taps;
        };

        // Schedule: calibration at t = 0, a reference capture, then the five sweeps of every
        // selected AOD, each closed by a reference recapture.
        ScenarioResult res;
        for (int a = 0; a < cells; ++a)
        {
            double peak = -std::numeric_limits<double>::infinity();
            for (const auto &p : cfg.paths)
                if (cell_of(p.aod_deg, step, cells) == a)
                    peak = std::max(peak, tx_dBm + p.path_gain_dB + 2.0 * g);
            res.rapid_scan.push_back({wrap_azimuth(a * step), std::isfinite(peak) ? peak : floor_dBm});
        }
        res.selected_aods = changen::select_aods(res.rapid_scan, floor_dBm);

        const auto &rp = cfg.paths[ref_path];
        const Pointing ref{cell_of(rp.aod_deg, step, cells), rp.tx_tilt, cell_of(rp.aoa_deg, step, cells), rp.rx_tilt};
        const auto plan = changen::plan_sweeps(band);

        std::vector<sounder::CaptureEvent> events;
        std::vector<Pointing> pointings;
        std::vector<double> times = {0.0};
        double t = 0.0;
        auto push = [&](const Pointing &pt, int sweep, bool is_ref) {
            t += cfg.step_duration_s;
            sounder::CaptureEvent e;
            e.wall_time_s = t;
            e.sweep_index = sweep;
            e.tx_azimuth = wrap_azimuth(pt.tx_cell * step);
            e.rx_azimuth = wrap_azimuth(pt.rx_cell * step);
            e.tx_tilt = pt.tx_tilt;
            e.rx_tilt = pt.rx_tilt;
            e.is_reference_mpc_recapture = is_ref;
            events.push_back(std::move(e));
            pointings.push_back(pt);
            times.push_back(t);
        };
        push(ref, 0, true);
        int sweep = 0;
        for (const auto &aod : res.selected_aods)
        {
            const int a = cell_of(aod.aod.degrees(), step, cells);
            for (const auto &row : plan.rows)
            {
                ++sweep;
                for (int r = 0; r < row.rx_azimuth_steps; ++r)
                    push({a, row.tx_tilt, r, row.rx_tilt}, sweep, false);
                push(ref, 0, true);
            }
        }

        const auto offsets = sounder::realize_clock_offsets(cfg.clock, times, rng);

        // Free-space calibration at 4 m, boresight-aligned horns.
        const double cal_gain = -(pathloss::fspl_1m(band.carrier_GHz) + 20.0 * std::log10(4.0)) + 2.0 * g + cfg.rx_gain_error_dB;
        const std::vector<sounder::ChannelTap> cal_taps = {{wrap_delay(free_space_delay_ns(4.0) + offsets[0]), cal_gain, 0.0}};
        const auto cal_pdp = capture(cal_taps);
        res.power_calibration = sounder::power_calibrate(cal_pdp, tx_dBm, {g, g}, band.carrier_GHz);
        res.time_calibration = sounder::time_calibrate(cal_pdp);

        for (std::size_t i = 0; i < events.size(); ++i)
        {
            events[i].pdp = circular_shift(capture(taps_for(pointings[i], offsets[i + 1])), res.time_calibration.shift_bins);
            res.true_offsets_ns.push_back(offsets[i + 1]);
        }

        auto corrected = sounder::drift_correct(events);
        res.drift = corrected.report;
        res.events = std::move(corrected.events);

        auto &c = res.campaign;
        c.header.band = band;
        c.header.site = "simulated";
        c.header.polarization = cfg.polarization;
        c.header.tx_power_dBm = tx_dBm;
        c.header.locations.push_back({cfg.location_id, cfg.distance_m, cfg.environment});
        const double gain_lin = db_to_linear(res.power_calibration.system_gain_dB);
        io::CalibrationEntry cal{cfg.location_id, res.power_calibration.system_gain_dB, res.time_calibration.shift_bins, {}};
        for (std::size_t k = 0; k < res.drift.reference_events.size(); ++k)
            cal.recaptures.push_back({res.events[res.drift.reference_events[k]].wall_time_s, res.drift.observed_displacement_ns[k]});
        for (const auto &e : res.events)
        {
            if (e.is_reference_mpc_recapture)
                continue;
            const auto snapped = sounder::snap_to_grid(e.pdp, 0.0);
            std::vector<double> p(snapped.powers_mW().begin(), snapped.powers_mW().end());
            for (double &x : p)
                x *= gain_lin;
            measproc::MeasurementRecord r;
            r.location_id = cfg.location_id;
            r.band = band.label;
            r.polarization = cfg.polarization;
            r.tx_azimuth = e.tx_azimuth;
            r.rx_azimuth = e.rx_azimuth;
            r.tx_tilt = e.tx_tilt;
            r.rx_tilt = e.rx_tilt;
            r.tx_gain_dBi = g;
            r.rx_gain_dBi = g;
            r.wall_time_s = e.wall_time_s;
            r.pdp = snapped.with_powers(std::move(p)).with_noise_floor(snapped.noise_floor_dBm() + res.power_calibration.system_gain_dB);
            c.records.push_back(std::move(r));
        }
        c.calibration.push_back(std::move(cal));
        io::validate(c);
        return res;
    }

} // namespace midchan::scenario
