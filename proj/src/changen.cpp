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

#include "midchan/changen.hpp"

#include "midchan/pathloss.hpp"
#include "midchan/reference_stats.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <tuple>

namespace midchan::changen
{
    // ---- Sweep planning ------------------------------------------------------------------------

    int SweepPlan::pointings_per_aod() const noexcept
    {
        int n = 0;
        for (const auto &r : rows)
            n += r.rx_azimuth_steps;
        return n;
    }

    SweepPlan plan_sweeps(const FrequencyBand &band)
    {
        if (!band.sweepable())
            throw ValidationError("plan_sweeps: HPBW " + std::to_string(band.hpbw_deg) + " deg does not divide 360 deg");
        const int steps = band.azimuth_steps();
        SweepPlan plan{band, {}};
        const int tilts[5][2] = {{0, 0}, {0, -1}, {0, 1}, {-1, 0}, {-1, -1}};
        for (int i = 0; i < 5; ++i)
            plan.rows.push_back({i + 1, tilts[i][0], tilts[i][1], steps});
        return plan;
    }

    // ---- AOD selection -------------------------------------------------------------------------

    double aod_selection_threshold_dBm(std::span<const AodPeak> peaks, double noise_floor_dBm)
    {
        if (peaks.empty())
            throw ValidationError("AOD selection needs at least one rapid-scan peak");
        double mx = peaks.front().peak_dBm;
        for (const auto &p : peaks)
            mx = std::max(mx, p.peak_dBm);
        return std::min(mx - 30.0, noise_floor_dBm + 10.0);
    }

    std::vector<AodPeak> select_aods(std::span<const AodPeak> peaks, double noise_floor_dBm)
    {
        const double thr = aod_selection_threshold_dBm(peaks, noise_floor_dBm);
        std::vector<AodPeak> out;
        for (const auto &p : peaks)
            if (p.peak_dBm > thr)
                out.push_back(p);
        return out;
    }

    std::vector<AodPeak> select_xpol_aods(std::span<const AodPeak> vv_peaks, double noise_floor_dBm)
    {
        std::vector<AodPeak> out;
        for (const auto &p : vv_peaks)
            if (p.peak_dBm >= noise_floor_dBm + kXpolMinimumSnrDb)
                out.push_back(p);
        return out;
    }

    // ---- Drop generation -----------------------------------------------------------------------

    namespace
    {
        constexpr double kTapLognormalDb = 3.0;
        // Excess delays span the decay range over which the exponential falls by 25 dB.
        const double kDelayExtent = 2.5 * std::log(10.0);

        // Intra-lobe tap scatter relative to the lobe-centre spread.
        constexpr double kIntraLobeRatio = 0.3;
        // Generated bins are kept within this range of the strongest bin, just inside the
        // 25 dB processing threshold so thresholding never alters a generated drop.
        constexpr double kKeepRangeDb = 24.9;
        constexpr double kNoiseBelowPeakDb = 80.0;
        constexpr long kGridMarginBins = 20;
        constexpr int kCalibrationDrops = 2000;
        constexpr std::uint64_t kCalibrationSeed = 0x6d69646368616eULL;

        // Parameter-free random draws of a drop; delays, powers and angles follow by scaling, so
        // tuning sweeps reuse the same draws (common random numbers).
        struct Skeleton
        {
            double distance_m = 0.0;
            std::vector<double> u;  // excess delay / (extent * decay), tap 0 is 0
            std::vector<double> zp; // log-normal power deviate
            std::vector<int> lobe;
            std::vector<double> za; // intra-lobe angle deviate
            double centre_deg = 0.0;
            std::vector<double> lobe_z; // lobe-centre offset deviates, lobe 0 is 0
        };

        struct Entry
        {
            int cell;
            long bin; // absolute 1 ns bin index
            double p;
        };

        int uniform_int(std::mt19937_64 &rng, int lo, int hi)
        {
            return std::uniform_int_distribution<int>(lo, hi)(rng);
        }

        Skeleton draw_skeleton(Environment env, std::optional<double> distance, std::mt19937_64 &rng)
        {
            Skeleton s;
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::normal_distribution<double> gauss(0.0, 1.0);
            s.distance_m = distance ? *distance : kMinMeasuredDistanceM + (kMaxMeasuredDistanceM - kMinMeasuredDistanceM) * uni(rng);
            const bool los = env == Environment::LOS;
            const int k = los ? uniform_int(rng, 8, 20) : uniform_int(rng, 12, 30);
            const int lobes = los ? uniform_int(rng, 1, 3) : uniform_int(rng, 2, 5);
            s.centre_deg = 360.0 * uni(rng);
            s.lobe_z.push_back(0.0);
            for (int l = 1; l < lobes; ++l)
                s.lobe_z.push_back(gauss(rng));
            s.u = {0.0};
            s.zp = {0.0};
            s.lobe = {0};
            s.za = {0.0};
            for (int i = 1; i < k; ++i)
            {
                s.u.push_back(1.0 - uni(rng));
                s.zp.push_back(gauss(rng));
                s.lobe.push_back(uniform_int(rng, 0, lobes - 1));
                s.za.push_back(gauss(rng));
            }
            return s;
        }

        std::vector<Entry> realize(const Skeleton &s, double decay_ns, double spread_deg, double step_deg, int cells)
        {
            const double toa = free_space_delay_ns(s.distance_m);
            std::vector<Entry> e;
            e.reserve(s.u.size());
            for (std::size_t i = 0; i < s.u.size(); ++i)
            {
                const double excess = kDelayExtent * decay_ns * s.u[i];
                const double p = std::exp(-kDelayExtent * s.u[i]) * db_to_linear(kTapLognormalDb * s.zp[i]);
                const double angle = s.centre_deg + spread_deg * (s.lobe_z[static_cast<std::size_t>(s.lobe[i])] +
                                                                  kIntraLobeRatio * s.za[i]);
                const int cell = static_cast<int>(std::lround(wrap_azimuth(angle).degrees() / step_deg)) % cells;
                e.push_back({cell, std::lround(toa + excess), p});
            }
            std::sort(e.begin(), e.end(), [](const Entry &a, const Entry &b) { return std::tie(a.cell, a.bin) < std::tie(b.cell, b.bin); });
            std::vector<Entry> merged;
            for (const auto &x : e)
            {
                if (!merged.empty() && merged.back().cell == x.cell && merged.back().bin == x.bin)
                    merged.back().p += x.p;
                else
                    merged.push_back(x);
            }
            double peak = 0.0;
            for (const auto &x : merged)
                peak = std::max(peak, x.p);
            const double keep = peak * db_to_linear(-kKeepRangeDb);
            std::erase_if(merged, [&](const Entry &x) { return x.p < keep; });
            return merged;
        }

        double omni_ds(const std::vector<Entry> &e)
        {
            long lo = e.front().bin, hi = e.front().bin;
            for (const auto &x : e)
            {
                lo = std::min(lo, x.bin);
                hi = std::max(hi, x.bin);
            }
            std::vector<double> p(static_cast<std::size_t>(hi - lo + 1), 0.0);
            for (const auto &x : e)
                p[static_cast<std::size_t>(x.bin - lo)] += x.p;
            return measproc::rms_delay_spread(PowerDelayProfile(static_cast<double>(lo), 1.0, std::move(p), kNumericFloorDbm));
        }

        measproc::PowerAngularSpectrum pas_of(const std::vector<Entry> &e, double step_deg, int cells)
        {
            measproc::PowerAngularSpectrum pas{measproc::PasSide::AOA, step_deg, std::vector<double>(static_cast<std::size_t>(cells), 0.0)};
            for (const auto &x : e)
                pas.powers_mW[static_cast<std::size_t>(x.cell)] += x.p;
            return pas;
        }

        struct Targets
        {
            double ds_ns;
            double asa_deg;
        };

        Targets targets_for(const FrequencyBand &band, Environment env)
        {
            if (env != Environment::LOS && env != Environment::NLOS)
                throw ValidationError("drop environment must be LOS or NLOS");
            return {reference::rms_delay_spread_mean(band.carrier_GHz, pathloss::Aggregation::Omni, env),
                    reference::omni_asa_mean(band.carrier_GHz, env)};
        }

        GeneratorShape tune(const FrequencyBand &band, Environment env)
        {
            const Targets t = targets_for(band, env);
            const int cells = band.azimuth_steps();
            std::mt19937_64 rng(kCalibrationSeed);
            std::vector<Skeleton> sk;
            sk.reserve(kCalibrationDrops);
            for (int i = 0; i < kCalibrationDrops; ++i)
                sk.push_back(draw_skeleton(env, std::nullopt, rng));

            auto mean_ds = [&](double decay, double spread) {
                double acc = 0.0;
                for (const auto &s : sk)
                    acc += omni_ds(realize(s, decay, spread, band.hpbw_deg, cells));
                return acc / static_cast<double>(sk.size());
            };
            auto mean_as = [&](double decay, double spread) {
                double acc = 0.0;
                for (const auto &s : sk)
                    acc += measproc::angular_spread(pas_of(realize(s, decay, spread, band.hpbw_deg, cells), band.hpbw_deg, cells),
                                                    measproc::SpreadMode::Omni);
                return acc / static_cast<double>(sk.size());
            };
            auto fit_decay = [&](GeneratorShape &g, int iterations) {
                for (int i = 0; i < iterations; ++i)
                {
                    const double m = mean_ds(g.decay_ns, g.lobe_spread_deg);
                    if (!(m > 0.0))
                        throw ComputationError("generator tuning: degenerate delay spread");
                    g.decay_ns *= t.ds_ns / m;
                }
            };

            GeneratorShape g{t.ds_ns, t.asa_deg};
            fit_decay(g, 6);

            // Mean spread grows with the lobe-centre spread until the lobes wrap the circle.
            double lo = 0.0, hi = 360.0;
            if (mean_as(g.decay_ns, hi) < t.asa_deg)
                throw ComputationError("generator tuning: angular spread target is unattainable");
            for (int i = 0; i < 40; ++i)
            {
                const double mid = 0.5 * (lo + hi);
                (mean_as(g.decay_ns, mid) < t.asa_deg ? lo : hi) = mid;
            }
            g.lobe_spread_deg = 0.5 * (lo + hi);
            fit_decay(g, 3);
            return g;
        }
    } // namespace

    GeneratorShape generator_shape(const FrequencyBand &band, Environment env)
    {
        static std::mutex mu;
        static std::map<std::tuple<double, double, int>, GeneratorShape> cache;
        validate(band);
        const auto key = std::make_tuple(band.carrier_GHz, band.hpbw_deg, static_cast<int>(env));
        {
            std::lock_guard lock(mu);
            if (auto it = cache.find(key); it != cache.end())
                return it->second;
        }
        const GeneratorShape g = tune(band, env);
        std::lock_guard lock(mu);
        cache.emplace(key, g);
        return g;
    }

    void validate(const DropConfig &cfg)
    {
        validate(cfg.band);
        if (!cfg.band.sweepable())
            throw ValidationError("drop band HPBW must divide 360 deg");
        targets_for(cfg.band, cfg.environment);
        pathloss::reference_ci_params(cfg.band.carrier_GHz, cfg.environment, pathloss::Aggregation::Omni);
        if (cfg.distance_m && !(*cfg.distance_m >= 1.0 && std::isfinite(*cfg.distance_m)))
            throw ValidationError("drop distance must be at least 1 m");
        if (cfg.tx_power_dBm && !std::isfinite(*cfg.tx_power_dBm))
            throw ValidationError("drop TX power must be finite");
    }

    measproc::DirectionalCaptureSet SyntheticDrop::capture_set() const
    {
        return measproc::DirectionalCaptureSet(location_id, config.polarization, config.band, records);
    }

    SyntheticDrop generate_drop(const DropConfig &cfg)
    {
        validate(cfg);
        const auto &band = cfg.band;
        const int cells = band.azimuth_steps();
        const Targets targets = targets_for(band, cfg.environment);
        const GeneratorShape shape = generator_shape(band, cfg.environment);
        const auto ci = pathloss::reference_ci_params(band.carrier_GHz, cfg.environment, pathloss::Aggregation::Omni);

        std::mt19937_64 rng(cfg.seed);
        SyntheticDrop d;
        d.config = cfg;
        d.location_id = cfg.location_id.empty() ? "drop-" + std::to_string(cfg.seed) : cfg.location_id;
        d.tx_power_dBm = cfg.tx_power_dBm.value_or(band.tx_power_dBm());
        d.target_rms_ds_ns = targets.ds_ns;
        d.target_asa_deg = targets.asa_deg;

        const Skeleton sk = draw_skeleton(cfg.environment, cfg.distance_m, rng);
        d.distance_m = sk.distance_m;
        d.extrapolated = d.distance_m < kMinMeasuredDistanceM || d.distance_m > kMaxMeasuredDistanceM;
        d.shadowing_dB = pathloss::sample_shadowing(ci.sigma_dB, rng);
        d.path_loss_dB = pathloss::ci_predict(ci, d.distance_m, d.shadowing_dB);
        d.polarization_loss_dB = cfg.polarization == Polarization::VH ? reference::xpd_dB(band.label) : 0.0;

        auto entries = realize(sk, shape.decay_ns, shape.lobe_spread_deg, band.hpbw_deg, cells);
        double total = 0.0;
        long first = entries.front().bin, last = entries.front().bin;
        for (const auto &e : entries)
        {
            total += e.p;
            first = std::min(first, e.bin);
            last = std::max(last, e.bin);
        }
        const double scale = db_to_linear(d.tx_power_dBm - d.path_loss_dB - d.polarization_loss_dB) / total;
        const double gain_dB = 2.0 * band.antenna_gain_dBi;
        const double gain = db_to_linear(gain_dB);

        const long start = std::max(0L, first - kGridMarginBins);
        const auto nbins = static_cast<std::size_t>(last - start + 1 + kGridMarginBins);
        std::vector<std::vector<double>> per_cell(static_cast<std::size_t>(cells), std::vector<double>(nbins, 0.0));
        double peak = 0.0;
        for (const auto &e : entries)
        {
            double &bin = per_cell[static_cast<std::size_t>(e.cell)][static_cast<std::size_t>(e.bin - start)];
            bin = e.p * scale * gain;
            peak = std::max(peak, bin);
        }
        const double floor = linear_to_db(peak) - kNoiseBelowPeakDb;

        for (int c = 0; c < cells; ++c)
        {
            measproc::MeasurementRecord r;
            r.location_id = d.location_id;
            r.band = band.label;
            r.polarization = cfg.polarization;
            r.tx_azimuth = wrap_azimuth(0.0);
            r.rx_azimuth = wrap_azimuth(band.hpbw_deg * c);
            r.tx_gain_dBi = band.antenna_gain_dBi;
            r.rx_gain_dBi = band.antenna_gain_dBi;
            r.pdp = PowerDelayProfile(static_cast<double>(start), 1.0, std::move(per_cell[static_cast<std::size_t>(c)]), floor);
            d.records.push_back(std::move(r));
        }

        const auto set = d.capture_set();
        d.omni_pdp = measproc::synthesize_omni_pdp(set);
        d.pas = measproc::build_pas(set, measproc::PasSide::AOA);
        d.lobes = measproc::segment_lobes(d.pas);
        d.realized = measproc::process_location(set, d.tx_power_dBm);
        return d;
    }

    std::uint64_t drop_seed(std::uint64_t base_seed, std::uint64_t index) noexcept
    {
        std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::vector<SyntheticDrop> generate_drops(const DropConfig &base, std::size_t n)
    {
        const std::string prefix = base.location_id.empty() ? "drop" : base.location_id;
        std::vector<SyntheticDrop> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            DropConfig cfg = base;
            cfg.seed = drop_seed(base.seed, i);
            cfg.location_id = prefix + "-" + std::to_string(i);
            out.push_back(generate_drop(cfg));
        }
        return out;
    }

    // ---- Ensemble summaries --------------------------------------------------------------------

    StatSummary summarize(std::span<const double> values)
    {
        if (values.empty())
            throw ValidationError("summarize: empty sample");
        StatSummary s;
        s.count = values.size();
        const double n = static_cast<double>(values.size());
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double var = 0.0;
        for (double v : values)
            var += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(var / n);
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            s.cdf.push_back({sorted[i], static_cast<double>(i + 1) / n});
        return s;
    }

    std::map<std::string, StatSummary> ensemble_stats(std::span<const SyntheticDrop> drops)
    {
        if (drops.empty())
            throw ValidationError("ensemble_stats: no drops");
        std::map<std::string, std::vector<double>> cols;
        for (const auto &d : drops)
        {
            cols["omni_rms_ds_ns"].push_back(d.realized.omni_rms_ds_ns);
            cols["omni_asa_deg"].push_back(d.realized.omni_as_deg);
            cols["omni_pl_dB"].push_back(d.realized.omni_pl_dB);
            cols["generated_pl_dB"].push_back(d.path_loss_dB);
            cols["mean_excess_delay_ns"].push_back(d.realized.mean_excess_delay_ns);
            cols["mean_directional_rms_ds_ns"].push_back(d.realized.mean_directional_rms_ds_ns);
        }
        std::map<std::string, StatSummary> out;
        for (const auto &[k, v] : cols)
            out.emplace(k, summarize(v));
        return out;
    }

} // namespace midchan::changen
