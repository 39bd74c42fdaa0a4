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

#ifndef MIDCHAN_MEASPROC_HPP
#define MIDCHAN_MEASPROC_HPP

#include "midchan/core.hpp"

#include <compare>
#include <span>
#include <string>
#include <vector>

// Directional measurement post-processing: PDP thresholding, multipath extraction, omnidirectional
// synthesis, power azimuth spectra, spatial lobes and RMS delay / angular spreads.

namespace midchan::measproc
{
    inline constexpr double kNoiseMarginDb = 5.0;        // threshold floor: noise + 5 dB
    inline constexpr double kPdpDynamicRangeDb = 25.0;   // threshold floor: peak - 25 dB
    inline constexpr double kSpatialLobeThresholdDb = 10.0;
    inline constexpr std::size_t kMinNoiseBins = 50;

    // One directional capture.
    struct MeasurementRecord
    {
        std::string location_id;
        BandLabel band = BandLabel::FR3;
        Polarization polarization = Polarization::VV;
        Azimuth tx_azimuth;
        Azimuth rx_azimuth;
        int tx_tilt = 0; // elevation in HPBW units
        int rx_tilt = 0;
        double tx_gain_dBi = 0.0;
        double rx_gain_dBi = 0.0;
        double wall_time_s = 0.0;
        PowerDelayProfile pdp;

        friend bool operator==(const MeasurementRecord &, const MeasurementRecord &) = default;
    };

    // Pointing cell on the HPBW grid: identifies a unique non-overlapping solid angle pair.
    struct CellKey
    {
        int tx_az = 0;
        int tx_tilt = 0;
        int rx_az = 0;
        int rx_tilt = 0;
        friend auto operator<=>(const CellKey &, const CellKey &) = default;
    };

    // Throws ValidationError if an azimuth is off the grid.
    CellKey cell_key(const MeasurementRecord &r, double step_deg);

    // All captures of one location and polarization. Construction validates that azimuths sit on
    // the band's HPBW grid and that no pointing cell is repeated.
    class DirectionalCaptureSet
    {
    public:
        DirectionalCaptureSet(std::string location_id, Polarization pol, FrequencyBand band,
                              std::vector<MeasurementRecord> records);

        const std::string &location_id() const noexcept { return location_id_; }
        Polarization polarization() const noexcept { return pol_; }
        const FrequencyBand &band() const noexcept { return band_; }
        std::span<const MeasurementRecord> records() const noexcept { return records_; }

        // Same set with every PDP replaced (grid, metadata and order kept).
        DirectionalCaptureSet with_pdps(std::vector<PowerDelayProfile> pdps) const;

    private:
        std::string location_id_;
        Polarization pol_;
        FrequencyBand band_;
        std::vector<MeasurementRecord> records_;
    };

    // ---- Delay domain --------------------------------------------------------------------------

    struct NoiseFloorEstimate
    {
        double floor_dBm = 0.0;
        bool degenerate = false; // noiseless leading region; floor set to kNumericFloorDbm
        std::size_t noise_bins = 0;
    };

    // Median power of the leading noise-only region before the first arrival. The first arrival is
    // the first bin within 25 dB of the peak that also clears the whole-profile median by 10 dB.
    // Throws ComputationError if fewer than 50 leading bins are available.
    NoiseFloorEstimate estimate_noise_floor(const PowerDelayProfile &pdp);

    // max(noise floor + 5 dB, peak - 25 dB). Uses the profile's noise floor, estimating it when NaN.
    double pdp_threshold_dBm(const PowerDelayProfile &pdp);

    // Zeroes bins below the threshold; the result may be empty (all zero).
    PowerDelayProfile apply_threshold(const PowerDelayProfile &pdp);

    // As apply_threshold, but throws ComputationError when nothing survives.
    PowerDelayProfile threshold_pdp(const PowerDelayProfile &pdp);

    struct Mpc
    {
        double delay_ns = 0.0;
        double power_mW = 0.0;
    };

    // Local maxima of a thresholded PDP; plateaus resolve to their earliest bin.
    std::vector<Mpc> extract_mpcs(const PowerDelayProfile &thresholded);

    struct DelayMoments
    {
        double mean_delay_ns = 0.0;
        double mean_excess_delay_ns = 0.0; // relative to the first non-zero bin
        double rms_delay_spread_ns = 0.0;
    };

    // Power-weighted moments over non-zero bins. Throws ComputationError for zero total power.
    DelayMoments delay_moments(const PowerDelayProfile &pdp);

    double rms_delay_spread(const PowerDelayProfile &pdp);

    // ---- Omnidirectional synthesis -------------------------------------------------------------

    // Sums, per delay bin, the linear power of every unique pointing cell after dividing out both
    // antenna gains. Repeated cells keep only their strongest capture. PDPs are used as given, so
    // threshold them first. Throws ValidationError if the delay grids differ.
    PowerDelayProfile synthesize_omni_pdp(std::span<const MeasurementRecord> records, double step_deg);
    PowerDelayProfile synthesize_omni_pdp(const DirectionalCaptureSet &set);

    // PL = tx power - total received omni power.
    double omni_path_loss(const PowerDelayProfile &omni, double tx_power_dBm);
    double omni_path_loss(const DirectionalCaptureSet &set, double tx_power_dBm);

    // ---- Angular domain ------------------------------------------------------------------------

    enum class PasSide
    {
        AOA,
        AOD
    };

    struct PowerAngularSpectrum
    {
        PasSide side = PasSide::AOA;
        double step_deg = 15.0;
        std::vector<double> powers_mW; // index i is azimuth i * step_deg

        double azimuth_deg(std::size_t i) const noexcept { return step_deg * static_cast<double>(i); }
        double total_power_mW() const noexcept;
        std::size_t peak_index() const noexcept;
    };

    // Total received power per azimuth on one side, summed over delay and over the other side's
    // pointing angles and tilts. Throws ValidationError unless every grid azimuth was captured.
    PowerAngularSpectrum build_pas(const DirectionalCaptureSet &set, PasSide side);

    struct SpatialLobe
    {
        std::vector<int> members; // grid indices, contiguous on the circle, in angular order
        std::vector<double> powers_mW;
        Azimuth peak_direction;
        double step_deg = 15.0;
    };

    // Groups directions at or above (peak - SLT) into circularly contiguous lobes.
    std::vector<SpatialLobe> segment_lobes(const PowerAngularSpectrum &pas,
                                           double slt_dB = kSpatialLobeThresholdDb);

    // Circular RMS spread in degrees: the minimum, over rotations of the branch cut, of the
    // power-weighted standard deviation of the wrapped angles. Exact over all continuous
    // rotations (the spread is piecewise constant between cut positions).
    double circular_rms_spread_deg(std::span<const double> angles_deg, std::span<const double> powers);

    enum class SpreadMode
    {
        Lobe, // every direction is used; caller has already applied the SLT
        Omni  // directions below peak - SLT are ignored
    };

    double angular_spread(const PowerAngularSpectrum &pas, SpreadMode mode);
    double angular_spread(const SpatialLobe &lobe);

    // ---- Per-location statistics ---------------------------------------------------------------

    struct ChannelStats
    {
        std::string location_id;
        std::vector<double> directional_rms_ds_ns; // non-empty beams only
        double mean_directional_rms_ds_ns = 0.0;    // NaN when no beam survives
        double omni_rms_ds_ns = 0.0;
        double mean_excess_delay_ns = 0.0;
        std::vector<double> lobe_as_deg;
        double omni_as_deg = 0.0;
        double omni_pl_dB = 0.0;
        std::vector<double> directional_pl_dB; // per non-empty beam, antenna gains removed
        double best_directional_pl_dB = 0.0;
    };

    // Thresholds every PDP, then derives delay, angle (AOA) and path loss statistics.
    ChannelStats process_location(const DirectionalCaptureSet &set, double tx_power_dBm);

} // namespace midchan::measproc

#endif
