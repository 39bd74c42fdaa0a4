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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace midchan::measproc
{
    namespace
    {
        double median(std::vector<double> v)
        {
            const std::size_t n = v.size();
            auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
            std::nth_element(v.begin(), mid, v.end());
            double hi = *mid;
            if (n % 2 == 1)
                return hi;
            double lo = *std::max_element(v.begin(), mid);
            return 0.5 * (lo + hi);
        }

        double weighted_std(std::span<const double> x, std::span<const double> w)
        {
            double sw = 0.0, sx = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                sw += w[i];
                sx += w[i] * x[i];
            }
            const double mean = sx / sw;
            double sv = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                sv += w[i] * (x[i] - mean) * (x[i] - mean);
            return std::sqrt(std::max(sv / sw, 0.0));
        }

        double gains_linear(const MeasurementRecord &r)
        {
            return db_to_linear(r.tx_gain_dBi + r.rx_gain_dBi);
        }
    } // namespace

    CellKey cell_key(const MeasurementRecord &r, double step_deg)
    {
        const int tx = azimuth_grid_index(r.tx_azimuth.degrees(), step_deg);
        const int rx = azimuth_grid_index(r.rx_azimuth.degrees(), step_deg);
        if (tx < 0 || rx < 0)
            throw ValidationError("pointing azimuth is not on the " + std::to_string(step_deg) + " deg grid");
        return {tx, r.tx_tilt, rx, r.rx_tilt};
    }

    DirectionalCaptureSet::DirectionalCaptureSet(std::string location_id, Polarization pol, FrequencyBand band,
                                                 std::vector<MeasurementRecord> records)
        : location_id_(std::move(location_id)), pol_(pol), band_(band), records_(std::move(records))
    {
        validate(band_);
        if (records_.empty())
            throw ValidationError("capture set for '" + location_id_ + "' has no records");
        std::set<CellKey> seen;
        for (const auto &r : records_)
        {
            if (r.location_id != location_id_)
                throw ValidationError("record location '" + r.location_id + "' does not match set '" +
                                      location_id_ + "'");
            if (r.polarization != pol_)
                throw ValidationError("record polarization does not match capture set");
            if (r.band != band_.label)
                throw ValidationError("record band does not match capture set");
            if (!seen.insert(cell_key(r, band_.hpbw_deg)).second)
                throw ValidationError("duplicate pointing cell in capture set '" + location_id_ + "'");
        }
    }

    DirectionalCaptureSet DirectionalCaptureSet::with_pdps(std::vector<PowerDelayProfile> pdps) const
    {
        if (pdps.size() != records_.size())
            throw ValidationError("with_pdps: PDP count does not match record count");
        DirectionalCaptureSet out = *this;
        for (std::size_t i = 0; i < pdps.size(); ++i)
            out.records_[i].pdp = std::move(pdps[i]);
        return out;
    }

    NoiseFloorEstimate estimate_noise_floor(const PowerDelayProfile &pdp)
    {
        auto p = pdp.powers_mW();
        if (p.size() <= kMinNoiseBins)
            throw ComputationError("estimate_noise_floor: PDP too short for a noise region");
        const double peak = pdp.peak_power_mW();
        if (peak == 0.0)
            return {kNumericFloorDbm, true, p.size()};

        const double overall = median(std::vector<double>(p.begin(), p.end()));
        const double arrival = std::max(peak * db_to_linear(-kPdpDynamicRangeDb), overall * db_to_linear(10.0));
        const auto first = static_cast<std::size_t>(
            std::find_if(p.begin(), p.end(), [&](double x) { return x >= arrival; }) - p.begin());
        if (first < kMinNoiseBins)
            throw ComputationError("estimate_noise_floor: fewer than 50 bins precede the first arrival");

        const double floor = median(std::vector<double>(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(first)));
        if (floor <= 0.0)
            return {kNumericFloorDbm, true, first};
        return {linear_to_db(floor), false, first};
    }

    namespace
    {
        double threshold_linear(const PowerDelayProfile &pdp)
        {
            double floor = pdp.noise_floor_dBm();
            if (std::isnan(floor))
                floor = estimate_noise_floor(pdp).floor_dBm;
            return std::max(db_to_linear(floor + kNoiseMarginDb),
                            pdp.peak_power_mW() * db_to_linear(-kPdpDynamicRangeDb));
        }
    } // namespace

    double pdp_threshold_dBm(const PowerDelayProfile &pdp)
    {
        return linear_to_db(threshold_linear(pdp));
    }

    PowerDelayProfile apply_threshold(const PowerDelayProfile &pdp)
    {
        const double thr = threshold_linear(pdp);
        std::vector<double> out(pdp.powers_mW().begin(), pdp.powers_mW().end());
        for (double &x : out)
            if (x < thr)
                x = 0.0;
        auto res = pdp.with_powers(std::move(out));
        if (std::isnan(pdp.noise_floor_dBm()))
            res = res.with_noise_floor(estimate_noise_floor(pdp).floor_dBm);
        return res;
    }

    PowerDelayProfile threshold_pdp(const PowerDelayProfile &pdp)
    {
        auto out = apply_threshold(pdp);
        if (out.total_power_mW() == 0.0)
            throw ComputationError("threshold_pdp: no bin above max(noise floor + 5 dB, peak - 25 dB)");
        return out;
    }

    std::vector<Mpc> extract_mpcs(const PowerDelayProfile &thresholded)
    {
        std::vector<Mpc> out;
        for (std::size_t i : local_maxima(thresholded.powers_mW()))
            out.push_back({thresholded.delay_ns(i), thresholded.power_mW(i)});
        return out;
    }

    DelayMoments delay_moments(const PowerDelayProfile &pdp)
    {
        auto p = pdp.powers_mW();
        const auto first_it = std::find_if(p.begin(), p.end(), [](double x) { return x > 0.0; });
        if (first_it == p.end())
            throw ComputationError("delay moments of a zero-power PDP are undefined");
        const auto first = static_cast<std::size_t>(first_it - p.begin());
        const double t0 = pdp.delay_ns(first);

        double sp = 0.0, st = 0.0;
        for (std::size_t i = first; i < p.size(); ++i)
        {
            sp += p[i];
            st += p[i] * (pdp.delay_ns(i) - t0);
        }
        const double excess = st / sp;
        double sv = 0.0;
        for (std::size_t i = first; i < p.size(); ++i)
        {
            const double d = pdp.delay_ns(i) - t0 - excess;
            sv += p[i] * d * d;
        }
        return {t0 + excess, excess, std::sqrt(sv / sp)};
    }

    double rms_delay_spread(const PowerDelayProfile &pdp)
    {
        return delay_moments(pdp).rms_delay_spread_ns;
    }

    PowerDelayProfile synthesize_omni_pdp(std::span<const MeasurementRecord> records, double step_deg)
    {
        if (records.empty())
            throw ValidationError("synthesize_omni_pdp: no records");
        const auto &grid = records.front().pdp;

        std::map<CellKey, std::size_t> strongest;
        for (std::size_t i = 0; i < records.size(); ++i)
        {
            if (!records[i].pdp.same_grid(grid))
                throw ValidationError("synthesize_omni_pdp: inconsistent delay grids");
            auto [it, fresh] = strongest.try_emplace(cell_key(records[i], step_deg), i);
            if (!fresh && records[i].pdp.total_power_mW() > records[it->second].pdp.total_power_mW())
                it->second = i;
        }

        std::vector<double> sum(grid.size(), 0.0);
        double noise = 0.0;
        for (const auto &[key, idx] : strongest)
        {
            const auto &r = records[idx];
            const double g = gains_linear(r);
            auto p = r.pdp.powers_mW();
            for (std::size_t k = 0; k < sum.size(); ++k)
                sum[k] += p[k] / g;
            noise += db_to_linear(r.pdp.noise_floor_dBm()) / g;
        }
        double floor = std::isnan(noise) ? noise : (noise > 0.0 ? linear_to_db(noise) : kNumericFloorDbm);
        return PowerDelayProfile(grid.start_delay_ns(), grid.bin_width_ns(), std::move(sum), floor);
    }

    PowerDelayProfile synthesize_omni_pdp(const DirectionalCaptureSet &set)
    {
        return synthesize_omni_pdp(set.records(), set.band().hpbw_deg);
    }

    double omni_path_loss(const PowerDelayProfile &omni, double tx_power_dBm)
    {
        const double total = omni.total_power_mW();
        if (total <= 0.0)
            throw ComputationError("omni_path_loss: omnidirectional PDP carries no power");
        return tx_power_dBm - linear_to_db(total);
    }

    double omni_path_loss(const DirectionalCaptureSet &set, double tx_power_dBm)
    {
        return omni_path_loss(synthesize_omni_pdp(set), tx_power_dBm);
    }

    double PowerAngularSpectrum::total_power_mW() const noexcept
    {
        return std::accumulate(powers_mW.begin(), powers_mW.end(), 0.0);
    }

    std::size_t PowerAngularSpectrum::peak_index() const noexcept
    {
        if (powers_mW.empty())
            return 0;
        return static_cast<std::size_t>(std::max_element(powers_mW.begin(), powers_mW.end()) - powers_mW.begin());
    }

    PowerAngularSpectrum build_pas(const DirectionalCaptureSet &set, PasSide side)
    {
        const double step = set.band().hpbw_deg;
        const auto n = static_cast<std::size_t>(set.band().azimuth_steps());
        PowerAngularSpectrum pas{side, step, std::vector<double>(n, 0.0)};
        std::vector<bool> covered(n, false);
        for (const auto &r : set.records())
        {
            const auto key = cell_key(r, step);
            const auto idx = static_cast<std::size_t>(side == PasSide::AOA ? key.rx_az : key.tx_az);
            pas.powers_mW[idx] += r.pdp.total_power_mW();
            covered[idx] = true;
        }
        if (std::find(covered.begin(), covered.end(), false) != covered.end())
            throw ValidationError("build_pas: captures do not cover the full azimuth circle");
        return pas;
    }

    std::vector<SpatialLobe> segment_lobes(const PowerAngularSpectrum &pas, double slt_dB)
    {
        std::vector<SpatialLobe> lobes;
        const std::size_t n = pas.powers_mW.size();
        if (n == 0)
            return lobes;
        const double peak = pas.powers_mW[pas.peak_index()];
        if (peak <= 0.0)
            return lobes;
        const double thr = peak * db_to_linear(-slt_dB);
        auto above = [&](std::size_t i) { return pas.powers_mW[i % n] >= thr; };

        std::size_t start = 0;
        while (start < n && above(start))
            ++start;

        auto make_lobe = [&](std::size_t from, std::size_t count) {
            SpatialLobe lobe;
            lobe.step_deg = pas.step_deg;
            std::size_t best = from % n;
            for (std::size_t k = 0; k < count; ++k)
            {
                const std::size_t i = (from + k) % n;
                lobe.members.push_back(static_cast<int>(i));
                lobe.powers_mW.push_back(pas.powers_mW[i]);
                if (pas.powers_mW[i] > pas.powers_mW[best])
                    best = i;
            }
            lobe.peak_direction = wrap_azimuth(pas.azimuth_deg(best));
            return lobe;
        };

        if (start == n) // every direction above the SLT: a single ring-shaped lobe
        {
            lobes.push_back(make_lobe(0, n));
            return lobes;
        }
        std::size_t i = start + 1;
        const std::size_t end = start + n;
        while (i < end)
        {
            if (!above(i))
            {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < end && above(j))
                ++j;
            lobes.push_back(make_lobe(i, j - i));
            i = j;
        }
        return lobes;
    }

    double circular_rms_spread_deg(std::span<const double> angles_deg, std::span<const double> powers)
    {
        if (angles_deg.size() != powers.size())
            throw ValidationError("circular_rms_spread_deg: angle and power lengths differ");
        std::vector<double> theta, w;
        for (std::size_t i = 0; i < powers.size(); ++i)
        {
            if (!(powers[i] >= 0.0) || !std::isfinite(powers[i]))
                throw ValidationError("circular_rms_spread_deg: powers must be finite and non-negative");
            if (powers[i] > 0.0)
            {
                theta.push_back(wrap_azimuth(angles_deg[i]).degrees());
                w.push_back(powers[i]);
            }
        }
        if (theta.empty())
            throw ComputationError("angular spread of a zero-power spectrum is undefined");

        // The wrapped configuration only changes when the branch cut (centre + 180) crosses a
        // sample, so one evaluation per arc between consecutive samples covers every rotation.
        std::vector<double> cuts = theta;
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        if (cuts.size() == 1)
            return 0.0;

        double best = std::numeric_limits<double>::infinity();
        std::vector<double> wrapped(theta.size());
        for (std::size_t k = 0; k < cuts.size(); ++k)
        {
            const double a = cuts[k];
            const double b = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + 360.0;
            const double cut = 0.5 * (a + b);
            const double centre = cut - 180.0;
            for (std::size_t i = 0; i < theta.size(); ++i)
                wrapped[i] = wrap_signed_deg(theta[i] - centre);
            best = std::min(best, weighted_std(wrapped, w));
        }
        return best;
    }

    double angular_spread(const PowerAngularSpectrum &pas, SpreadMode mode)
    {
        std::vector<double> angles(pas.powers_mW.size()), powers = pas.powers_mW;
        for (std::size_t i = 0; i < angles.size(); ++i)
            angles[i] = pas.azimuth_deg(i);
        if (mode == SpreadMode::Omni && !powers.empty())
        {
            const double thr = powers[pas.peak_index()] * db_to_linear(-kSpatialLobeThresholdDb);
            for (double &p : powers)
                if (p < thr)
                    p = 0.0;
        }
        return circular_rms_spread_deg(angles, powers);
    }

    double angular_spread(const SpatialLobe &lobe)
    {
        std::vector<double> angles(lobe.members.size());
        for (std::size_t i = 0; i < angles.size(); ++i)
            angles[i] = lobe.step_deg * lobe.members[i];
        return circular_rms_spread_deg(angles, lobe.powers_mW);
    }

    ChannelStats process_location(const DirectionalCaptureSet &set, double tx_power_dBm)
    {
        ChannelStats st;
        st.location_id = set.location_id();

        std::vector<PowerDelayProfile> thresholded;
        thresholded.reserve(set.records().size());
        for (const auto &r : set.records())
            thresholded.push_back(apply_threshold(r.pdp));

        double best_rx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < thresholded.size(); ++i)
        {
            const double total = thresholded[i].total_power_mW();
            if (total <= 0.0)
                continue;
            const auto &r = set.records()[i];
            st.directional_rms_ds_ns.push_back(rms_delay_spread(thresholded[i]));
            const double pl = tx_power_dBm + r.tx_gain_dBi + r.rx_gain_dBi - linear_to_db(total);
            st.directional_pl_dB.push_back(pl);
            best_rx = std::max(best_rx, -pl);
        }
        if (st.directional_rms_ds_ns.empty())
            throw ComputationError("location '" + set.location_id() + "': no directional PDP survives thresholding");
        st.best_directional_pl_dB = -best_rx;
        st.mean_directional_rms_ds_ns =
            std::accumulate(st.directional_rms_ds_ns.begin(), st.directional_rms_ds_ns.end(), 0.0) /
            static_cast<double>(st.directional_rms_ds_ns.size());

        const auto tset = set.with_pdps(std::move(thresholded));
        const auto omni = synthesize_omni_pdp(tset);
        const auto m = delay_moments(omni);
        st.omni_rms_ds_ns = m.rms_delay_spread_ns;
        st.mean_excess_delay_ns = m.mean_excess_delay_ns;
        st.omni_pl_dB = omni_path_loss(omni, tx_power_dBm);

        const auto pas = build_pas(tset, PasSide::AOA);
        for (const auto &lobe : segment_lobes(pas))
            st.lobe_as_deg.push_back(angular_spread(lobe));
        st.omni_as_deg = angular_spread(pas, SpreadMode::Omni);
        return st;
    }

} // namespace midchan::measproc
