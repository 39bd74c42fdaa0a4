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

#include "midchan/report.hpp"

#include "midchan/reference_stats.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace midchan::report
{
    using ojson = nlohmann::ordered_json;

    namespace
    {
        ojson num(double x)
        {
            return std::isfinite(x) ? ojson(x) : ojson(nullptr);
        }

        ojson num_array(std::span<const double> v)
        {
            ojson a = ojson::array();
            for (double x : v)
                a.push_back(num(x));
            return a;
        }

        ojson summary_json(const changen::StatSummary &s, bool include_cdf)
        {
            ojson j;
            j["count"] = s.count;
            j["mean"] = num(s.mean);
            j["sd"] = num(s.sd);
            if (include_cdf)
            {
                ojson cdf = ojson::array();
                for (const auto &p : s.cdf)
                    cdf.push_back(ojson::array({num(p.value), p.probability}));
                j["cdf"] = std::move(cdf);
            }
            return j;
        }

        ojson ci_json(const pathloss::CIParams &p)
        {
            ojson j;
            j["carrier_GHz"] = p.carrier_GHz;
            j["environment"] = std::string(to_string(p.environment));
            j["aggregation"] = std::string(pathloss::to_string(p.aggregation));
            j["n"] = p.n;
            j["sigma_dB"] = p.sigma_dB;
            return j;
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

        ojson stats_json(const measproc::ChannelStats &s, const io::LocationInfo *info)
        {
            ojson j;
            j["location_id"] = s.location_id;
            j["environment"] = info && info->environment ? ojson(std::string(to_string(*info->environment))) : ojson(nullptr);
            j["distance_m"] = info && info->distance_m ? ojson(*info->distance_m) : ojson(nullptr);
            j["omni_pl_dB"] = num(s.omni_pl_dB);
            j["omni_rms_ds_ns"] = num(s.omni_rms_ds_ns);
            j["mean_excess_delay_ns"] = num(s.mean_excess_delay_ns);
            j["omni_asa_deg"] = num(s.omni_as_deg);
            j["lobe_asa_deg"] = num_array(s.lobe_as_deg);
            j["mean_directional_rms_ds_ns"] = num(s.mean_directional_rms_ds_ns);
            j["directional_rms_ds_ns"] = num_array(s.directional_rms_ds_ns);
            j["best_directional_pl_dB"] = num(s.best_directional_pl_dB);
            j["directional_pl_dB"] = num_array(s.directional_pl_dB);
            return j;
        }

        ojson provenance_json()
        {
            ojson j;
            j["format_version"] = io::kFormatVersion;
            j["pdp_threshold"] = "max(noise_floor_dBm + 5, peak_dBm - 25); bins below are zeroed";
            j["spatial_lobe_threshold_dB"] = measproc::kSpatialLobeThresholdDb;
            j["aod_selection"] = "peak_dBm > min(max_peak_dBm - 30, noise_floor_dBm + 10)";
            j["xpol_aod_selection"] = "co-polarized peak_dBm >= noise_floor_dBm + 30";
            j["omni_synthesis"] = "per-bin linear sum over unique pointing cells (strongest capture per cell), "
                                  "TX and RX antenna gains removed";
            j["angular_spread"] = "rotation-minimized power-weighted circular standard deviation; omni mode "
                                  "ignores directions more than 10 dB below the PAS peak";
            j["ci_model"] = "PL = 32.4 + 20 log10(f_GHz) + 10 n log10(d_m); n by least squares, sigma = RMS residual";
            return j;
        }

        void add_fit(StatsReport &r, const std::string &label, const std::vector<pathloss::PathLossSample> &s,
                     double carrier)
        {
            if (s.size() < 2)
                return;
            try
            {
                r.fits.push_back({label, s.size(), pathloss::ci_fit(s, carrier)});
            }
            catch (const ComputationError &)
            {
                // every sample at the 1 m anchor: the exponent is unidentifiable, skip the fit
            }
        }
    } // namespace

    std::string format_number(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }

    StatsReport build_stats_report(const io::CampaignFile &campaign)
    {
        StatsReport r;
        r.header = campaign.header;
        const double fc = campaign.header.band.carrier_GHz;

        using pathloss::Aggregation;
        std::vector<pathloss::PathLossSample> omni_los, omni_nlos, dir_los, dir_nlos_best, dir_nlos;
        std::map<std::string, std::map<std::string, std::vector<double>>> cols;

        for (const auto &set : campaign.capture_sets())
        {
            auto st = measproc::process_location(set, campaign.header.tx_power_dBm);
            const auto *info = campaign.location(set.location_id());
            std::vector<std::string> groups = {"all"};
            if (info && info->environment)
                groups.emplace_back(to_string(*info->environment));
            for (const auto &g : groups)
            {
                auto &c = cols[g];
                c["omni_rms_ds_ns"].push_back(st.omni_rms_ds_ns);
                c["omni_asa_deg"].push_back(st.omni_as_deg);
                c["omni_pl_dB"].push_back(st.omni_pl_dB);
                c["mean_excess_delay_ns"].push_back(st.mean_excess_delay_ns);
                c["mean_directional_rms_ds_ns"].push_back(st.mean_directional_rms_ds_ns);
            }
            if (info && info->environment && info->distance_m && *info->distance_m >= 1.0)
            {
                const double d = *info->distance_m;
                if (*info->environment == Environment::LOS)
                {
                    omni_los.push_back({d, st.omni_pl_dB, Environment::LOS, Aggregation::Omni});
                    dir_los.push_back({d, st.best_directional_pl_dB, Environment::LOS, Aggregation::Directional});
                }
                else
                {
                    omni_nlos.push_back({d, st.omni_pl_dB, Environment::NLOS, Aggregation::Omni});
                    dir_nlos_best.push_back({d, st.best_directional_pl_dB, Environment::NLOS_Best, Aggregation::Directional});
                    for (double pl : st.directional_pl_dB)
                        dir_nlos.push_back({d, pl, Environment::NLOS, Aggregation::Directional});
                }
            }
            r.locations.push_back(std::move(st));
        }

        add_fit(r, "directional LOS", dir_los, fc);
        add_fit(r, "directional NLOS_Best", dir_nlos_best, fc);
        add_fit(r, "directional NLOS", dir_nlos, fc);
        add_fit(r, "omni LOS", omni_los, fc);
        add_fit(r, "omni NLOS", omni_nlos, fc);

        for (const auto &[g, c] : cols)
            for (const auto &[k, v] : c)
                r.ensemble[g].emplace(k, changen::summarize(v));
        return r;
    }

    std::string to_json(const StatsReport &r)
    {
        ojson j;
        ojson h;
        h["site"] = r.header.site;
        h["band"] = band_json(r.header.band);
        h["polarization"] = std::string(to_string(r.header.polarization));
        h["tx_power_dBm"] = r.header.tx_power_dBm;
        h["tx_height_m"] = r.header.tx_height_m;
        h["rx_height_m"] = r.header.rx_height_m;
        j["campaign"] = std::move(h);

        ojson locs = ojson::array();
        for (const auto &s : r.locations)
        {
            const io::LocationInfo *info = nullptr;
            for (const auto &l : r.header.locations)
                if (l.id == s.location_id)
                    info = &l;
            locs.push_back(stats_json(s, info));
        }
        j["locations"] = std::move(locs);

        ojson fits = ojson::array();
        for (const auto &f : r.fits)
        {
            ojson fj = ci_json(f.params);
            fj["label"] = f.label;
            fj["samples"] = f.samples;
            fits.push_back(std::move(fj));
        }
        j["ci_fits"] = std::move(fits);

        ojson ens;
        for (const auto &[g, stats] : r.ensemble)
            for (const auto &[k, s] : stats)
                ens[g][k] = summary_json(s, true);
        j["ensemble"] = ens.is_null() ? ojson::object() : std::move(ens);
        j["provenance"] = provenance_json();
        return j.dump(2) + "\n";
    }

    std::string pdp_csv(const PowerDelayProfile &pdp)
    {
        std::string out = "delay_ns,power_dBm\n";
        for (std::size_t i = 0; i < pdp.size(); ++i)
        {
            out += format_number(pdp.delay_ns(i));
            out += ',';
            if (pdp.power_mW(i) > 0.0)
                out += format_number(linear_to_db(pdp.power_mW(i)));
            out += '\n';
        }
        return out;
    }

    std::string pas_csv(const measproc::PowerAngularSpectrum &pas)
    {
        std::string out = "azimuth_deg,power_dBm\n";
        for (std::size_t i = 0; i < pas.powers_mW.size(); ++i)
        {
            out += format_number(pas.azimuth_deg(i));
            out += ',';
            if (pas.powers_mW[i] > 0.0)
                out += format_number(linear_to_db(pas.powers_mW[i]));
            out += '\n';
        }
        return out;
    }

    std::string sweep_plan_json(const changen::SweepPlan &plan)
    {
        ojson j;
        j["band"] = band_json(plan.band);
        ojson rows = ojson::array();
        for (const auto &r : plan.rows)
        {
            ojson rj;
            rj["sweep"] = r.sweep_index;
            rj["tx_tilt"] = r.tx_tilt;
            rj["rx_tilt"] = r.rx_tilt;
            rj["tx_elevation_deg"] = r.tx_tilt * plan.band.hpbw_deg;
            rj["rx_elevation_deg"] = r.rx_tilt * plan.band.hpbw_deg;
            rj["rx_azimuth_steps"] = r.rx_azimuth_steps;
            rows.push_back(std::move(rj));
        }
        j["sweeps"] = std::move(rows);
        j["pointings_per_aod"] = plan.pointings_per_aod();
        return j.dump(2) + "\n";
    }

    std::string sweep_plan_csv(const changen::SweepPlan &plan)
    {
        std::string out = "sweep,tx_tilt,rx_tilt,rx_azimuth_steps\n";
        for (const auto &r : plan.rows)
            out += std::to_string(r.sweep_index) + ',' + std::to_string(r.tx_tilt) + ',' + std::to_string(r.rx_tilt) +
                   ',' + std::to_string(r.rx_azimuth_steps) + '\n';
        return out;
    }

    std::string params_json(std::optional<double> carrier_GHz, std::optional<Environment> env,
                            std::optional<pathloss::Aggregation> agg)
    {
        if (carrier_GHz && env && agg)
        {
            const auto p = pathloss::reference_ci_params(*carrier_GHz, *env, *agg);
            ojson j;
            j["n"] = p.n;
            j["sigma_dB"] = p.sigma_dB;
            return j.dump() + "\n";
        }
        auto keep_f = [&](double f) { return !carrier_GHz || std::abs(f - *carrier_GHz) < 1e-9; };
        auto keep_e = [&](Environment e) { return !env || e == *env; };
        auto keep_a = [&](pathloss::Aggregation a) { return !agg || a == *agg; };

        ojson j;
        ojson ci = ojson::array();
        for (const auto &p : pathloss::reference_ci_table())
            if (keep_f(p.carrier_GHz) && keep_e(p.environment) && keep_a(p.aggregation))
                ci.push_back(ci_json(p));
        j["ci_path_loss"] = std::move(ci);

        ojson ds = ojson::array();
        for (const auto &d : reference::rms_delay_spread_means())
            if (keep_f(d.carrier_GHz) && keep_e(d.environment) && keep_a(d.aggregation))
                ds.push_back({{"carrier_GHz", d.carrier_GHz},
                              {"environment", std::string(to_string(d.environment))},
                              {"aggregation", std::string(pathloss::to_string(d.aggregation))},
                              {"mean_rms_ds_ns", d.mean_ns}});
        j["rms_delay_spread"] = std::move(ds);

        ojson as = ojson::array();
        if (keep_a(pathloss::Aggregation::Omni))
            for (const auto &a : reference::omni_asa_means())
                if (keep_f(a.carrier_GHz) && keep_e(a.environment))
                    as.push_back({{"carrier_GHz", a.carrier_GHz},
                                  {"environment", std::string(to_string(a.environment))},
                                  {"mean_omni_asa_deg", a.omni_asa_deg}});
        j["omni_asa"] = std::move(as);

        ojson bands = ojson::array();
        for (const auto &b : {fr1c_band(), fr3_band()})
            if (keep_f(b.carrier_GHz))
            {
                ojson bj = band_json(b);
                bj["xpd_dB"] = reference::xpd_dB(b.label);
                bands.push_back(std::move(bj));
            }
        j["bands"] = std::move(bands);
        return j.dump(2) + "\n";
    }

    std::string ci_fit_json(const pathloss::CIParams &p, std::size_t samples)
    {
        ojson j = ci_json(p);
        j["d0_m"] = pathloss::CIParams::d0_m;
        j["samples"] = samples;
        return j.dump(2) + "\n";
    }

    std::string drops_json(std::span<const changen::SyntheticDrop> drops, bool include_cdf)
    {
        ojson j;
        ojson arr = ojson::array();
        for (const auto &d : drops)
        {
            ojson dj;
            dj["location_id"] = d.location_id;
            dj["seed"] = d.config.seed;
            dj["band"] = std::string(to_string(d.config.band.label));
            dj["environment"] = std::string(to_string(d.config.environment));
            dj["polarization"] = std::string(to_string(d.config.polarization));
            dj["distance_m"] = d.distance_m;
            dj["extrapolated"] = d.extrapolated;
            dj["tx_power_dBm"] = d.tx_power_dBm;
            dj["shadowing_dB"] = d.shadowing_dB;
            dj["path_loss_dB"] = d.path_loss_dB;
            dj["polarization_loss_dB"] = d.polarization_loss_dB;
            dj["target_rms_ds_ns"] = d.target_rms_ds_ns;
            dj["target_asa_deg"] = d.target_asa_deg;
            ojson rj;
            rj["omni_pl_dB"] = num(d.realized.omni_pl_dB);
            rj["omni_rms_ds_ns"] = num(d.realized.omni_rms_ds_ns);
            rj["omni_asa_deg"] = num(d.realized.omni_as_deg);
            rj["mean_excess_delay_ns"] = num(d.realized.mean_excess_delay_ns);
            rj["lobes"] = d.lobes.size();
            dj["realized"] = std::move(rj);
            arr.push_back(std::move(dj));
        }
        j["drops"] = std::move(arr);
        ojson ens;
        if (!drops.empty())
            for (const auto &[k, s] : changen::ensemble_stats(drops))
                ens[k] = summary_json(s, include_cdf);
        j["ensemble"] = ens.is_null() ? ojson::object() : std::move(ens);
        return j.dump(2) + "\n";
    }

    io::CampaignFile campaign_from_drops(std::span<const changen::SyntheticDrop> drops, const std::string &site)
    {
        if (drops.empty())
            throw ValidationError("campaign_from_drops: no drops");
        io::CampaignFile c;
        const auto &first = drops.front();
        c.header.band = first.config.band;
        c.header.site = site;
        c.header.polarization = first.config.polarization;
        c.header.tx_power_dBm = first.tx_power_dBm;
        for (const auto &d : drops)
        {
            if (!(d.config.band == c.header.band) || d.config.polarization != c.header.polarization ||
                d.tx_power_dBm != c.header.tx_power_dBm)
                throw ValidationError("campaign_from_drops: drops must share band, polarization and TX power");
            c.header.locations.push_back({d.location_id, d.distance_m, d.config.environment});
            c.records.insert(c.records.end(), d.records.begin(), d.records.end());
        }
        io::validate(c);
        return c;
    }

} // namespace midchan::report
