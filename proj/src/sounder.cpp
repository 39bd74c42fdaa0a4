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

#include "midchan/sounder.hpp"

#include "midchan/measproc.hpp"
#include "midchan/pathloss.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>

namespace midchan::sounder
{
    namespace
    {
        using cd = std::complex<double>;

        std::mutex &fftw_planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        struct FftwFree
        {
            void operator()(fftw_complex *p) const noexcept { fftw_free(p); }
        };
        using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

        FftwBuffer fftw_buffer(std::size_t n)
        {
            auto *p = fftw_alloc_complex(n);
            if (p == nullptr)
                throw std::bad_alloc();
            return FftwBuffer(p);
        }

        // Owns a pair of in-place plans (forward / backward) on one buffer.
        class FftPair
        {
        public:
            explicit FftPair(std::size_t n) : n_(n), buf_(fftw_buffer(n))
            {
                std::lock_guard lock(fftw_planner_mutex());
                const int len = static_cast<int>(n);
                fwd_ = fftw_plan_dft_1d(len, buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
                bwd_ = fftw_plan_dft_1d(len, buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
                if (fwd_ == nullptr || bwd_ == nullptr)
                    throw ComputationError("FFTW plan creation failed");
            }
            ~FftPair()
            {
                std::lock_guard lock(fftw_planner_mutex());
                fftw_destroy_plan(fwd_);
                fftw_destroy_plan(bwd_);
            }
            FftPair(const FftPair &) = delete;
            FftPair &operator=(const FftPair &) = delete;

            cd *data() noexcept { return reinterpret_cast<cd *>(buf_.get()); }
            void forward() noexcept { fftw_execute(fwd_); }
            void backward() noexcept { fftw_execute(bwd_); }
            std::size_t size() const noexcept { return n_; }

        private:
            std::size_t n_;
            FftwBuffer buf_;
            fftw_plan fwd_ = nullptr;
            fftw_plan bwd_ = nullptr;
        };

        long floor_div(double x) { return static_cast<long>(std::floor(x)); }

        std::size_t wrap_index(long i, std::size_t n)
        {
            const long m = static_cast<long>(n);
            return static_cast<std::size_t>(((i % m) + m) % m);
        }

        double sample_period_ns(double chip_rate_Mcps) { return 1000.0 / (chip_rate_Mcps * kSamplesPerChip); }

        void add_noise(std::vector<cd> &x, double variance, std::mt19937_64 &rng)
        {
            if (variance <= 0.0)
                return;
            std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
            for (auto &v : x)
                v += cd(g(rng), g(rng));
        }
    } // namespace

    std::vector<int> default_taps(int order)
    {
        switch (order)
        {
        case 2: return {2, 1};
        case 3: return {3, 2};
        case 4: return {4, 3};
        case 5: return {5, 3};
        case 6: return {6, 5};
        case 7: return {7, 6};
        case 8: return {8, 6, 5, 4};
        case 9: return {9, 5};
        case 10: return {10, 7};
        case 11: return {11, 9};
        case 12: return {12, 11, 10, 4};
        case 13: return {13, 12, 11, 8};
        case 14: return {14, 13, 12, 2};
        case 15: return {15, 14};
        case 16: return {16, 15, 13, 4};
        case 17: return {17, 14};
        case 18: return {18, 11};
        case 19: return {19, 18, 17, 14};
        case 20: return {20, 17};
        default: throw ValidationError("no default PN taps for register order " + std::to_string(order));
        }
    }

    PnSequence gen_pn(int order, std::span<const int> taps, double chip_rate_Mcps)
    {
        if (order < 2 || order > 24)
            throw ValidationError("PN register order must be in [2, 24]");
        if (!(chip_rate_Mcps > 0.0) || !std::isfinite(chip_rate_Mcps))
            throw ValidationError("PN chip rate must be positive");
        if (taps.empty() || std::find(taps.begin(), taps.end(), order) == taps.end())
            throw ValidationError("PN taps must include the register order");
        std::uint32_t feedback = 0;
        for (int t : taps)
        {
            if (t < 1 || t > order)
                throw ValidationError("PN tap " + std::to_string(t) + " outside [1, order]");
            feedback ^= 1u << (t - 1);
        }

        // Bit (t - 1) of the state holds a[n - t]; the register starts all ones.
        const std::uint32_t mask = (1u << order) - 1u;
        const std::size_t length = (std::size_t{1} << order) - 1;
        const std::uint32_t initial = mask;
        std::uint32_t state = initial;

        PnSequence pn;
        pn.order = order;
        pn.chip_rate_Mcps = chip_rate_Mcps;
        pn.chips.reserve(length);
        for (std::size_t n = 0; n < length; ++n)
        {
            const auto bit = static_cast<std::uint32_t>(std::popcount(state & feedback) & 1);
            pn.chips.push_back(bit == 0 ? std::int8_t{1} : std::int8_t{-1});
            state = ((state << 1) | bit) & mask;
            if (state == initial && n + 1 < length)
                throw ValidationError("PN taps are not primitive: period " + std::to_string(n + 1) +
                                      " is shorter than " + std::to_string(length));
        }
        if (state != initial)
            throw ValidationError("PN taps are not primitive: register does not return to its seed");
        return pn;
    }

    PnSequence gen_pn(int order)
    {
        const auto taps = default_taps(order);
        return gen_pn(order, taps);
    }

    std::vector<long> periodic_autocorrelation(const PnSequence &pn)
    {
        const std::size_t L = pn.length();
        std::vector<long> r(L, 0);
        for (std::size_t lag = 0; lag < L; ++lag)
        {
            long s = 0;
            for (std::size_t k = 0; k < L; ++k)
                s += pn.chips[k] * pn.chips[(k + lag) % L];
            r[lag] = s;
        }
        return r;
    }

    double dilation_factor(const CorrelatorConfig &cfg)
    {
        if (!(cfg.slow_rate_Mcps > 0.0) || !std::isfinite(cfg.fast_rate_Mcps))
            throw ValidationError("correlator rates must be positive and finite");
        if (!(cfg.slow_rate_Mcps < cfg.fast_rate_Mcps))
            throw ValidationError("correlator slow rate must be below the fast rate");
        return cfg.fast_rate_Mcps / (cfg.fast_rate_Mcps - cfg.slow_rate_Mcps);
    }

    RxCapture channel_convolve(const PnSequence &pn, std::span<const ChannelTap> taps, double snr_dB,
                               std::mt19937_64 &rng, const ConvolveOptions &opts)
    {
        if (taps.empty())
            throw ValidationError("channel_convolve: empty tap list");
        if (pn.chips.empty())
            throw ValidationError("channel_convolve: empty PN sequence");
        if (opts.periods < 1)
            throw ValidationError("channel_convolve: at least one period is required");
        if (std::isnan(snr_dB))
            throw ValidationError("channel_convolve: SNR is NaN");

        const std::size_t L = pn.length();
        const std::size_t N = L * kSamplesPerChip;
        const double ts = sample_period_ns(pn.chip_rate_Mcps);
        const double ptx = db_to_linear(opts.tx_power_dBm);

        std::vector<cd> period(N, cd(0.0, 0.0));
        double strongest = 0.0;
        for (const auto &tap : taps)
        {
            if (!(tap.delay_ns >= 0.0) || !std::isfinite(tap.delay_ns) || !std::isfinite(tap.gain_dB))
                throw ValidationError("channel_convolve: tap delays must be finite and non-negative");
            const double p = ptx * db_to_linear(tap.gain_dB);
            strongest = std::max(strongest, p);
            const cd amp = std::polar(std::sqrt(p), tap.phase_rad);
            const double shift = tap.delay_ns / ts; // in samples

            // Integrate-and-dump over [k, k + 1) samples of the delayed rectangular chip waveform;
            // a sample spans at most one chip boundary.
            for (std::size_t k = 0; k < N; ++k)
            {
                const double a = static_cast<double>(k) - shift;
                const double b = a + 1.0;
                const long chip = floor_div(a / kSamplesPerChip);
                const double boundary = static_cast<double>((chip + 1) * kSamplesPerChip);
                const double c0 = pn.chips[wrap_index(chip, L)];
                double v = c0;
                if (boundary < b)
                {
                    const double c1 = pn.chips[wrap_index(chip + 1, L)];
                    v = c0 * (boundary - a) + c1 * (b - boundary);
                }
                period[k] += amp * v;
            }
        }

        RxCapture rx;
        rx.period_samples = N;
        rx.chip_rate_Mcps = pn.chip_rate_Mcps;
        rx.noise_power_mW = std::isinf(snr_dB) && snr_dB > 0 ? 0.0 : kSamplesPerChip * strongest / db_to_linear(snr_dB);
        rx.samples.reserve(N * static_cast<std::size_t>(opts.periods));
        for (int p = 0; p < opts.periods; ++p)
        {
            std::vector<cd> chunk = period;
            add_noise(chunk, rx.noise_power_mW, rng);
            rx.samples.insert(rx.samples.end(), chunk.begin(), chunk.end());
        }
        return rx;
    }

    RxCapture noise_capture(const PnSequence &pn, double noise_power_mW, std::mt19937_64 &rng, int periods)
    {
        if (!(noise_power_mW >= 0.0) || !std::isfinite(noise_power_mW))
            throw ValidationError("noise_capture: noise power must be finite and non-negative");
        if (periods < 1)
            throw ValidationError("noise_capture: at least one period is required");
        RxCapture rx;
        rx.period_samples = pn.length() * kSamplesPerChip;
        rx.chip_rate_Mcps = pn.chip_rate_Mcps;
        rx.noise_power_mW = noise_power_mW;
        rx.samples.assign(rx.period_samples * static_cast<std::size_t>(periods), cd(0.0, 0.0));
        add_noise(rx.samples, noise_power_mW, rng);
        return rx;
    }

    PowerDelayProfile sliding_correlate(const RxCapture &rx, const PnSequence &pn, const CorrelatorConfig &cfg)
    {
        const double kappa = dilation_factor(cfg);
        if (pn.chip_rate_Mcps != cfg.fast_rate_Mcps || rx.chip_rate_Mcps != cfg.fast_rate_Mcps)
            throw ValidationError("sliding_correlate: PN / capture chip rate does not match the correlator");
        const std::size_t N = pn.length() * kSamplesPerChip;
        if (rx.period_samples != N || rx.samples.empty() || rx.samples.size() % N != 0)
            throw ValidationError("sliding_correlate: capture is not a whole number of PN periods");

        FftPair ref(N), sig(N);
        for (std::size_t k = 0; k < N; ++k)
            ref.data()[k] = cd(pn.chips[k / kSamplesPerChip], 0.0);
        ref.forward();

        const int periods = rx.periods();
        const double norm = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
        std::vector<double> acc(N, 0.0);
        for (int p = 0; p < periods; ++p)
        {
            std::copy_n(rx.samples.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(p) * N), N,
                        sig.data());
            sig.forward();
            for (std::size_t k = 0; k < N; ++k)
                sig.data()[k] *= std::conj(ref.data()[k]);
            sig.backward();
            for (std::size_t k = 0; k < N; ++k)
                acc[k] += std::norm(sig.data()[k] * norm);
        }
        for (double &v : acc)
            v /= periods;

        const double floor = rx.noise_power_mW > 0.0 ? linear_to_db(rx.noise_power_mW / static_cast<double>(N))
                                                     : kNumericFloorDbm;
        return PowerDelayProfile(0.0, sample_period_ns(cfg.fast_rate_Mcps) * kappa, std::move(acc), floor);
    }

    PowerDelayProfile undilate(const PowerDelayProfile &dilated, const CorrelatorConfig &cfg)
    {
        const double kappa = dilation_factor(cfg);
        return PowerDelayProfile(dilated.start_delay_ns() / kappa, dilated.bin_width_ns() / kappa,
                                 std::vector<double>(dilated.powers_mW().begin(), dilated.powers_mW().end()),
                                 dilated.noise_floor_dBm());
    }

    double peak_delay_ns(const PowerDelayProfile &pdp)
    {
        if (pdp.empty() || pdp.peak_power_mW() <= 0.0)
            throw ComputationError("peak_delay_ns: profile carries no power");
        const std::size_t n = pdp.size();
        const std::size_t i = pdp.peak_index();
        if (n < 3)
            return pdp.delay_ns(i);
        // The correlation of a rectangular chip sampled at two samples per chip is a triangle, for
        // which this amplitude ratio recovers the fractional offset exactly.
        const double am = std::sqrt(pdp.power_mW((i + n - 1) % n));
        const double ap = std::sqrt(pdp.power_mW((i + 1) % n));
        const double frac = (am + ap) > 0.0 ? (ap - am) / (ap + am) : 0.0;
        return pdp.delay_ns(i) + frac * pdp.bin_width_ns();
    }

    PowerCalibration power_calibrate(const PowerDelayProfile &pdp, double tx_power_dBm, const AntennaGains &gains,
                                     double carrier_GHz, std::optional<double> nominal_system_gain_dB,
                                     double distance_m)
    {
        if (!(distance_m >= 1.0))
            throw ValidationError("power_calibrate: calibration distance must be at least 1 m");
        const auto thr = measproc::threshold_pdp(pdp);
        const double peak = thr.peak_power_mW();
        std::size_t strong = 0;
        for (std::size_t i : local_maxima(thr.powers_mW()))
            if (thr.power_mW(i) >= peak * db_to_linear(-10.0))
                ++strong;
        if (strong > 1)
            throw ComputationError("power_calibrate: several peaks within 10 dB of the strongest "
                                   "(reflection-contaminated calibration capture)");

        PowerCalibration cal;
        cal.received_power_dBm = linear_to_db(thr.total_power_mW());
        cal.expected_path_loss_dB = pathloss::fspl_1m(carrier_GHz) + 20.0 * std::log10(distance_m);
        const double eirp_plus_rx = tx_power_dBm + gains.tx_dBi + gains.rx_dBi;
        cal.system_gain_dB = eirp_plus_rx - cal.expected_path_loss_dB - cal.received_power_dBm;
        const double applied = nominal_system_gain_dB.value_or(cal.system_gain_dB);
        cal.recovered_path_loss_dB = eirp_plus_rx - (cal.received_power_dBm + applied);
        cal.nonlinear = std::abs(cal.recovered_path_loss_dB - cal.expected_path_loss_dB) > 1.0;
        return cal;
    }

    TimeCalibration time_calibrate(const PowerDelayProfile &pdp, double expected_delay_ns)
    {
        if (!std::isfinite(expected_delay_ns))
            throw ValidationError("time_calibrate: expected delay must be finite");
        double floor = pdp.noise_floor_dBm();
        if (std::isnan(floor))
            floor = measproc::estimate_noise_floor(pdp).floor_dBm;
        if (pdp.empty() || !(pdp.peak_power_mW() > db_to_linear(floor + measproc::kNoiseMarginDb)))
            throw ComputationError("time_calibrate: no peak above the noise threshold");
        const double peak = peak_delay_ns(pdp);
        TimeCalibration out;
        out.shift_bins = std::lround((expected_delay_ns - peak) / pdp.bin_width_ns());
        out.shifted = circular_shift(pdp, out.shift_bins);
        return out;
    }

    TimeCalibration time_calibrate(const PowerDelayProfile &pdp)
    {
        return time_calibrate(pdp, free_space_delay_ns(4.0));
    }

    double deterministic_offset_ns(const ClockModel &clock, double wall_time_s)
    {
        return clock.initial_phase_offset_ns + clock.frequency_offset_ppt * 1e-3 * wall_time_s;
    }

    std::vector<double> realize_clock_offsets(const ClockModel &clock, std::span<const double> wall_times_s,
                                              std::mt19937_64 &rng)
    {
        if (clock.jitter_ns_per_sqrt_s < 0.0)
            throw ValidationError("clock jitter intensity must be non-negative");
        std::vector<double> out;
        out.reserve(wall_times_s.size());
        std::normal_distribution<double> g(0.0, 1.0);
        double walk = 0.0, prev = 0.0;
        for (double t : wall_times_s)
        {
            if (!(t >= prev))
                throw ValidationError("clock offsets require non-decreasing, non-negative wall times");
            if (clock.jitter_ns_per_sqrt_s > 0.0)
                walk += clock.jitter_ns_per_sqrt_s * std::sqrt(t - prev) * g(rng);
            prev = t;
            out.push_back(deterministic_offset_ns(clock, t) + walk);
        }
        return out;
    }

    namespace
    {
        void require_time_ordered(std::span<const CaptureEvent> schedule)
        {
            for (std::size_t i = 1; i < schedule.size(); ++i)
                if (schedule[i].wall_time_s < schedule[i - 1].wall_time_s)
                    throw ValidationError("capture schedule is not ordered by wall time");
        }
    } // namespace

    std::vector<CaptureEvent> apply_drift(std::span<const CaptureEvent> schedule, std::span<const double> offsets_ns)
    {
        if (schedule.size() != offsets_ns.size())
            throw ValidationError("apply_drift: one offset per event is required");
        require_time_ordered(schedule);
        std::vector<CaptureEvent> out(schedule.begin(), schedule.end());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i].pdp = out[i].pdp.with_start_delay(out[i].pdp.start_delay_ns() + offsets_ns[i]);
        return out;
    }

    std::vector<CaptureEvent> apply_drift(std::span<const CaptureEvent> schedule, const ClockModel &clock)
    {
        std::vector<double> offsets;
        offsets.reserve(schedule.size());
        for (const auto &e : schedule)
            offsets.push_back(deterministic_offset_ns(clock, e.wall_time_s));
        return apply_drift(schedule, offsets);
    }

    DriftCorrection drift_correct(std::span<const CaptureEvent> schedule, std::optional<double> reference_true_delay_ns)
    {
        if (schedule.empty())
            throw ValidationError("drift_correct: empty schedule");
        require_time_ordered(schedule);
        if (!schedule.front().is_reference_mpc_recapture || !schedule.back().is_reference_mpc_recapture)
            throw ValidationError("drift_correct: schedule must start and end with a reference-MPC capture");

        // Every sweep must be closed by a recapture before the next one begins.
        int open_sweep = -1;
        for (const auto &e : schedule)
        {
            if (e.is_reference_mpc_recapture)
            {
                open_sweep = -1;
                continue;
            }
            if (open_sweep >= 0 && e.sweep_index != open_sweep)
                throw ValidationError("drift_correct: missing reference recapture after sweep " +
                                      std::to_string(open_sweep));
            open_sweep = e.sweep_index;
        }

        DriftCorrection out;
        auto &rep = out.report;
        for (std::size_t i = 0; i < schedule.size(); ++i)
            if (schedule[i].is_reference_mpc_recapture)
                rep.reference_events.push_back(i);

        const double truth = reference_true_delay_ns.value_or(peak_delay_ns(schedule.front().pdp));
        double prev = 0.0;
        for (std::size_t idx : rep.reference_events)
        {
            const auto &pdp = schedule[idx].pdp;
            const double span = pdp.bin_width_ns() * static_cast<double>(pdp.size());
            double d = peak_delay_ns(pdp) - truth;
            d += span * std::round((prev - d) / span); // unwrap against the previous recapture
            rep.observed_displacement_ns.push_back(d);
            prev = d;
        }

        rep.corrections_ns.assign(schedule.size(), 0.0);
        const auto &refs = rep.reference_events;
        const auto &disp = rep.observed_displacement_ns;
        auto interpolate = [&](std::size_t a, std::size_t b, double t) {
            const double ta = schedule[refs[a]].wall_time_s, tb = schedule[refs[b]].wall_time_s;
            if (tb <= ta)
                return disp[a];
            return disp[a] + (disp[b] - disp[a]) * (t - ta) / (tb - ta);
        };
        for (std::size_t r = 0; r + 1 < refs.size(); ++r)
            for (std::size_t i = refs[r]; i <= refs[r + 1]; ++i)
                rep.corrections_ns[i] = interpolate(r, r + 1, schedule[i].wall_time_s);
        rep.corrections_ns[refs.back()] = disp.back();

        // Leave-one-out check: predict each interior recapture from its neighbours.
        for (std::size_t r = 1; r + 1 < refs.size(); ++r)
        {
            const double res = interpolate(r - 1, r + 1, schedule[refs[r]].wall_time_s) - disp[r];
            rep.reference_residuals_ns.push_back(res);
            rep.max_abs_reference_residual_ns = std::max(rep.max_abs_reference_residual_ns, std::abs(res));
        }

        out.events.assign(schedule.begin(), schedule.end());
        for (std::size_t i = 0; i < out.events.size(); ++i)
            out.events[i].pdp =
                out.events[i].pdp.with_start_delay(out.events[i].pdp.start_delay_ns() - rep.corrections_ns[i]);
        return out;
    }

    PowerDelayProfile snap_to_grid(const PowerDelayProfile &pdp, double grid_start_ns)
    {
        if (!std::isfinite(grid_start_ns))
            throw ValidationError("snap_to_grid: grid start must be finite");
        const long shift = std::lround((pdp.start_delay_ns() - grid_start_ns) / pdp.bin_width_ns());
        return circular_shift(pdp.with_start_delay(grid_start_ns), shift);
    }

} // namespace midchan::sounder
