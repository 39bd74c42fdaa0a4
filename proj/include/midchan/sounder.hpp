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

#ifndef MIDCHAN_SOUNDER_HPP
#define MIDCHAN_SOUNDER_HPP

#include "midchan/core.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

// Sliding-correlation channel sounder simulation at complex baseband.
//
// The transmitter repeats a maximal-length PN sequence at the fast chip rate. The receiver
// correlates against the same sequence clocked slightly slower, so the two slide past one another
// and the correlator output is a time-dilated PDP. The dilation (slide) factor is
//   fast / (fast - slow),
// 8000 for 500 / 499.9375 Mcps. Received samples are integrate-and-dump at two samples per chip,
// which gives the 1 ns delay bins of the undilated PDP at 500 Mcps.

namespace midchan::sounder
{
    struct PnSequence
    {
        std::vector<std::int8_t> chips; // +1 / -1
        int order = 0;                  // register length m; chips.size() == 2^m - 1
        double chip_rate_Mcps = 500.0;

        std::size_t length() const noexcept { return chips.size(); }
    };

    // Feedback taps of a known primitive polynomial for register orders 2..20.
    std::vector<int> default_taps(int order);

    // Fibonacci LFSR a[n] = XOR_{t in taps} a[n - t]. Throws ValidationError if the taps do not
    // yield the full period 2^m - 1.
    PnSequence gen_pn(int order, std::span<const int> taps, double chip_rate_Mcps = 500.0);
    PnSequence gen_pn(int order = 11);

    // Periodic autocorrelation sum_k c[k] c[k + lag] for every lag in [0, L).
    std::vector<long> periodic_autocorrelation(const PnSequence &pn);

    struct CorrelatorConfig
    {
        double fast_rate_Mcps = 500.0;
        double slow_rate_Mcps = 499.9375;
    };

    double dilation_factor(const CorrelatorConfig &cfg);

    struct ChannelTap
    {
        double delay_ns = 0.0;
        double gain_dB = 0.0; // power gain relative to the transmitted signal
        double phase_rad = 0.0;
    };

    struct ConvolveOptions
    {
        double tx_power_dBm = 0.0;
        int periods = 20; // PDPs averaged per capture
    };

    inline constexpr int kSamplesPerChip = 2;

    // Received baseband samples: `periods` consecutive PN periods with independent noise.
    struct RxCapture
    {
        std::vector<std::complex<double>> samples;
        std::size_t period_samples = 0;
        double chip_rate_Mcps = 500.0;
        double noise_power_mW = 0.0; // per-sample noise variance
        int periods() const noexcept
        {
            return period_samples == 0 ? 0 : static_cast<int>(samples.size() / period_samples);
        }
    };

    // Superposition of delayed, scaled PN replicas plus white Gaussian noise. SNR is relative to
    // the strongest tap and referenced to the chip-rate bandwidth; +inf disables noise.
    RxCapture channel_convolve(const PnSequence &pn, std::span<const ChannelTap> taps, double snr_dB,
                               std::mt19937_64 &rng, const ConvolveOptions &opts = {});

    // Noise-only capture with the given per-sample noise power.
    RxCapture noise_capture(const PnSequence &pn, double noise_power_mW, std::mt19937_64 &rng,
                            int periods = 20);

    // Correlates every PN period against the local sequence and averages the resulting power
    // profiles. The result is on the dilated time axis (bin = sample period x slide factor).
    PowerDelayProfile sliding_correlate(const RxCapture &rx, const PnSequence &pn, const CorrelatorConfig &cfg);

    // Compresses a dilated PDP back to absolute propagation delay.
    PowerDelayProfile undilate(const PowerDelayProfile &dilated, const CorrelatorConfig &cfg);

    // Peak delay with sub-bin refinement from the two neighbouring amplitudes.
    double peak_delay_ns(const PowerDelayProfile &pdp);

    // ---- Calibration ---------------------------------------------------------------------------

    struct AntennaGains
    {
        double tx_dBi = 0.0;
        double rx_dBi = 0.0;
    };

    struct PowerCalibration
    {
        double system_gain_dB = 0.0;       // correction added to raw received power
        double received_power_dBm = 0.0;   // raw, thresholded area of the capture
        double expected_path_loss_dB = 0.0; // FSPL at the calibration distance
        double recovered_path_loss_dB = 0.0;
        bool nonlinear = false; // recovered PL with the nominal gain off by more than 1 dB
    };

    // Free-space calibration at a known distance. Throws ComputationError when a second peak within
    // 10 dB of the strongest is present (reflection contamination).
    PowerCalibration power_calibrate(const PowerDelayProfile &pdp, double tx_power_dBm, const AntennaGains &gains,
                                     double carrier_GHz, std::optional<double> nominal_system_gain_dB = {},
                                     double distance_m = 4.0);

    struct TimeCalibration
    {
        long shift_bins = 0;
        PowerDelayProfile shifted;
    };

    // Circularly shifts the PDP so its peak lands on the expected free-space delay.
    TimeCalibration time_calibrate(const PowerDelayProfile &pdp, double expected_delay_ns);
    TimeCalibration time_calibrate(const PowerDelayProfile &pdp);

    // ---- Clock drift ---------------------------------------------------------------------------

    // Offset between the untethered TX and RX rubidium references, measured from the time
    // calibration instant (wall time 0):
    //   offset(t) = initial_phase + frequency_offset * t + W(t)
    // with frequency_offset in parts per trillion (1 ppt over 1000 s = 1 ns) and W a Wiener
    // process of intensity jitter_ns_per_sqrt_s.
    struct ClockModel
    {
        double frequency_offset_ppt = 0.0;
        double initial_phase_offset_ns = 0.0;
        double jitter_ns_per_sqrt_s = 0.0;
    };

    double deterministic_offset_ns(const ClockModel &clock, double wall_time_s);

    // Samples the clock offset at non-decreasing wall times.
    std::vector<double> realize_clock_offsets(const ClockModel &clock, std::span<const double> wall_times_s,
                                              std::mt19937_64 &rng);

    struct CaptureEvent
    {
        double wall_time_s = 0.0;
        int sweep_index = 0; // 0 for reference captures
        Azimuth tx_azimuth;
        Azimuth rx_azimuth;
        int tx_tilt = 0; // elevation in HPBW units
        int rx_tilt = 0;
        PowerDelayProfile pdp;
        bool is_reference_mpc_recapture = false;
    };

    // Shifts each event's delay axis by the given offsets.
    std::vector<CaptureEvent> apply_drift(std::span<const CaptureEvent> schedule, std::span<const double> offsets_ns);

    // Shifts each event's delay axis by a clock without jitter.
    std::vector<CaptureEvent> apply_drift(std::span<const CaptureEvent> schedule, const ClockModel &clock);

    struct DriftReport
    {
        std::vector<double> corrections_ns;       // per event
        std::vector<std::size_t> reference_events; // indices of reference captures
        std::vector<double> observed_displacement_ns;
        std::vector<double> reference_residuals_ns; // interior recaptures: neighbour interpolation minus observation
        double max_abs_reference_residual_ns = 0.0;
    };

    struct DriftCorrection
    {
        std::vector<CaptureEvent> events;
        DriftReport report;
    };

    // Successive drift correction. The reference MPC is recaptured after every azimuthal sweep;
    // the displacement of its peak is linearly interpolated in wall time between consecutive
    // recaptures and removed from each event's delay axis. The reference true delay defaults to the
    // peak of the first capture.
    DriftCorrection drift_correct(std::span<const CaptureEvent> schedule,
                                  std::optional<double> reference_true_delay_ns = {});

    // Moves a PDP onto a common delay grid by an integer circular shift (rounded).
    PowerDelayProfile snap_to_grid(const PowerDelayProfile &pdp, double grid_start_ns);

} // namespace midchan::sounder

#endif
