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

#ifndef MIDCHAN_CHANGEN_HPP
#define MIDCHAN_CHANGEN_HPP

#include "midchan/core.hpp"
#include "midchan/measproc.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

// Campaign planning (sweep schedule, AOD selection) and drop-based statistical channel generation.
//
// A drop is one independent indoor channel realization: path loss from the close-in model with
// log-normal shadowing, an exponentially decaying tap cluster whose decay constant is tuned so the
// ensemble-mean omnidirectional RMS delay spread hits the measured mean, and a clustered azimuth
// spectrum whose lobe width is tuned so the ensemble-mean omnidirectional RMS AOA spread hits the
// measured mean. Drops are emitted as directional captures so they run through measproc unchanged.

namespace midchan::changen
{
    // ---- Sweep planning ------------------------------------------------------------------------

    struct SweepRow
    {
        int sweep_index = 0; // 1..5
        int tx_tilt = 0;     // HPBW units, 0 or -1
        int rx_tilt = 0;     // HPBW units, -1, 0 or +1
        int rx_azimuth_steps = 0;
    };

    struct SweepPlan
    {
        FrequencyBand band;
        std::vector<SweepRow> rows;

        // Pointing tuples per TX AOD (sum of RX steps over all sweeps).
        int pointings_per_aod() const noexcept;
    };

    // Five RX azimuth sweeps: boresight, RX down/up one HPBW, TX down one HPBW, both down.
    // Throws ValidationError unless the HPBW divides 360 deg.
    SweepPlan plan_sweeps(const FrequencyBand &band);

    // ---- AOD selection -------------------------------------------------------------------------

    struct AodPeak
    {
        Azimuth aod;
        double peak_dBm = 0.0;
    };

    // min(max peak - 30 dB, noise floor + 10 dB).
    double aod_selection_threshold_dBm(std::span<const AodPeak> peaks, double noise_floor_dBm);

    // AODs with a peak strictly above the selection threshold. Throws ValidationError when empty.
    std::vector<AodPeak> select_aods(std::span<const AodPeak> peaks, double noise_floor_dBm);

    inline constexpr double kXpolMinimumSnrDb = 30.0;

    // AODs whose co-polarized peak is at least 30 dB above the noise floor.
    std::vector<AodPeak> select_xpol_aods(std::span<const AodPeak> vv_peaks, double noise_floor_dBm);

    // ---- Drop generation -----------------------------------------------------------------------

    inline constexpr double kMinMeasuredDistanceM = 11.0;
    inline constexpr double kMaxMeasuredDistanceM = 97.0;

    struct DropConfig
    {
        FrequencyBand band = fr3_band();
        Environment environment = Environment::LOS; // LOS or NLOS
        std::optional<double> distance_m;           // uniform over the measured range when unset
        std::uint64_t seed = 0;
        Polarization polarization = Polarization::VV; // V-H drops are attenuated by the band XPD
        std::optional<double> tx_power_dBm;           // defaults to EIRP minus antenna gain
        std::string location_id;                      // defaults to "drop-<seed>"
    };

    // Throws ValidationError if the (band, environment) pair has no generator targets.
    void validate(const DropConfig &cfg);

    struct SyntheticDrop
    {
        DropConfig config;
        std::string location_id;
        double distance_m = 0.0;
        bool extrapolated = false; // distance outside the measured 11-97 m range
        double tx_power_dBm = 0.0;
        double shadowing_dB = 0.0;
        double path_loss_dB = 0.0;         // co-polarized omni path loss drawn from the model
        double polarization_loss_dB = 0.0; // XPD for V-H drops, else 0
        double target_rms_ds_ns = 0.0;
        double target_asa_deg = 0.0;

        PowerDelayProfile omni_pdp; // antenna gains removed; total = tx power - PL - polarization loss
        measproc::PowerAngularSpectrum pas;
        std::vector<measproc::SpatialLobe> lobes;
        std::vector<measproc::MeasurementRecord> records; // one TX pointing, every RX azimuth
        measproc::ChannelStats realized;

        measproc::DirectionalCaptureSet capture_set() const;
    };

    SyntheticDrop generate_drop(const DropConfig &cfg);

    // Independent per-drop seed derived from a base seed (SplitMix64).
    std::uint64_t drop_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

    // n drops with seeds drop_seed(base.seed, i) and ids "<prefix>-<i>".
    std::vector<SyntheticDrop> generate_drops(const DropConfig &base, std::size_t n);

    // Tuned generator shape parameters for one (band, environment), cached after the first call.
    struct GeneratorShape
    {
        double decay_ns = 0.0;       // exponential power-delay decay constant
        double lobe_spread_deg = 0.0; // s.d. of lobe centres around the main lobe
    };
    GeneratorShape generator_shape(const FrequencyBand &band, Environment env);

    // ---- Ensemble summaries --------------------------------------------------------------------

    struct CdfPoint
    {
        double value = 0.0;
        double probability = 0.0;
    };

    struct StatSummary
    {
        std::size_t count = 0;
        double mean = 0.0;
        double sd = 0.0; // population standard deviation
        std::vector<CdfPoint> cdf; // sorted values, P = i / n
    };

    // Throws ValidationError for an empty sample.
    StatSummary summarize(std::span<const double> values);

    // Per-statistic summaries keyed by name: omni_rms_ds_ns, omni_asa_deg, omni_pl_dB,
    // generated_pl_dB, mean_excess_delay_ns, mean_directional_rms_ds_ns.
    std::map<std::string, StatSummary> ensemble_stats(std::span<const SyntheticDrop> drops);

} // namespace midchan::changen

#endif
