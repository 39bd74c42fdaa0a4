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

#ifndef MIDCHAN_CORE_HPP
#define MIDCHAN_CORE_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace midchan
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s

    // Lowest representable positive power, in dBm. Used as the noise floor of noiseless profiles.
    extern const double kNumericFloorDbm;

    // Bad input: violated precondition, malformed data, unknown table entry.
    class ValidationError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Valid input that cannot be processed: zero power, empty profile, singular fit.
    class ComputationError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ---- Unit conversions ----------------------------------------------------------------------

    double db_to_linear(double x_dB);

    // Returns -inf for zero power; throws ValidationError for negative or non-finite input.
    double linear_to_db(double linear);

    // ---- Angles and delays ---------------------------------------------------------------------

    // Azimuth in degrees, always in [0, 360). 0 deg is geographic North.
    class Azimuth
    {
    public:
        Azimuth() = default;
        double degrees() const noexcept { return deg_; }
        friend bool operator==(const Azimuth &, const Azimuth &) = default;

    private:
        explicit Azimuth(double wrapped) noexcept : deg_(wrapped) {}
        double deg_ = 0.0;
        friend Azimuth wrap_azimuth(double degrees);
    };

    // Wraps any finite angle onto [0, 360).
    Azimuth wrap_azimuth(double degrees);

    // Wraps an angle onto [-180, 180).
    double wrap_signed_deg(double degrees);

    // Propagation delay over a free-space distance.
    double free_space_delay_ns(double distance_m);

    // ---- Categorical labels --------------------------------------------------------------------

    enum class Environment
    {
        LOS,
        NLOS,
        NLOS_Best
    };

    enum class Polarization
    {
        VV,
        VH
    };

    std::string_view to_string(Environment e);
    std::string_view to_string(Polarization p);
    Environment parse_environment(std::string_view s);
    Polarization parse_polarization(std::string_view s);

    // ---- Frequency bands -----------------------------------------------------------------------

    enum class BandLabel
    {
        FR1C,
        FR3,
        Reference
    };

    std::string_view to_string(BandLabel b);
    BandLabel parse_band_label(std::string_view s);

    struct FrequencyBand
    {
        BandLabel label = BandLabel::Reference;
        double carrier_GHz = 0.0;
        double hpbw_deg = 0.0;
        double antenna_gain_dBi = 0.0;
        double eirp_dBm = 0.0;
        double link_margin_dB = 0.0;

        // True if the azimuth circle is an integer number of HPBW steps.
        bool sweepable() const noexcept;

        // 360 / HPBW; throws ValidationError when the band is not sweepable.
        int azimuth_steps() const;

        // Conducted power into the TX horn (EIRP minus antenna gain).
        double tx_power_dBm() const noexcept { return eirp_dBm - antenna_gain_dBi; }

        friend bool operator==(const FrequencyBand &, const FrequencyBand &) = default;
    };

    // Throws ValidationError if the band violates its invariants.
    void validate(const FrequencyBand &band);

    FrequencyBand fr1c_band(); // 6.75 GHz, 30 deg horns
    FrequencyBand fr3_band();  // 16.95 GHz, 15 deg horns

    // Returns the embedded band for FR1C / FR3.
    FrequencyBand band_by_label(BandLabel label);

    // Azimuth grid index on a band grid, or -1 if the azimuth is off-grid.
    int azimuth_grid_index(double azimuth_deg, double step_deg);

    // ---- Power delay profile -------------------------------------------------------------------

    // Received power vs absolute propagation delay on a uniform delay grid. Powers are linear (mW).
    class PowerDelayProfile
    {
    public:
        PowerDelayProfile() = default;
        PowerDelayProfile(double start_delay_ns, double bin_width_ns, std::vector<double> powers_mW,
                          double noise_floor_dBm);

        double start_delay_ns() const noexcept { return start_; }
        double bin_width_ns() const noexcept { return bin_; }
        double noise_floor_dBm() const noexcept { return floor_dBm_; }
        std::size_t size() const noexcept { return powers_.size(); }
        bool empty() const noexcept { return powers_.empty(); }

        std::span<const double> powers_mW() const noexcept { return powers_; }
        double power_mW(std::size_t i) const { return powers_.at(i); }
        double delay_ns(std::size_t i) const noexcept { return start_ + bin_ * static_cast<double>(i); }
        std::vector<double> delays_ns() const;

        double total_power_mW() const noexcept;
        double peak_power_mW() const noexcept;
        std::size_t peak_index() const noexcept; // first global maximum; 0 for an empty profile

        // Same grid (start, width, length) within 1e-9 ns.
        bool same_grid(const PowerDelayProfile &other) const noexcept;

        PowerDelayProfile with_powers(std::vector<double> powers_mW) const;
        PowerDelayProfile with_start_delay(double start_delay_ns) const;
        PowerDelayProfile with_noise_floor(double noise_floor_dBm) const;

        friend bool operator==(const PowerDelayProfile &, const PowerDelayProfile &) = default;

    private:
        double start_ = 0.0;
        double bin_ = 1.0;
        std::vector<double> powers_;
        double floor_dBm_ = 0.0;
    };

    // Rotates the powers by `bins` (positive moves energy to later delays); the grid is unchanged.
    PowerDelayProfile circular_shift(const PowerDelayProfile &pdp, long bins);

    // Indices of local maxima among strictly positive samples. A plateau of equal samples counts
    // once, at its first index. Edges are treated as zero-valued neighbours (no wrap).
    std::vector<std::size_t> local_maxima(std::span<const double> x);

} // namespace midchan

#endif
