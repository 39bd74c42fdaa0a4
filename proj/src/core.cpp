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

#include "midchan/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace midchan
{
    const double kNumericFloorDbm = 10.0 * std::log10(std::numeric_limits<double>::min());

    double db_to_linear(double x_dB)
    {
        return std::pow(10.0, x_dB / 10.0);
    }

    double linear_to_db(double linear)
    {
        if (!std::isfinite(linear) || linear < 0.0)
            throw ValidationError("linear_to_db: power must be finite and non-negative");
        if (linear == 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(linear);
    }

    Azimuth wrap_azimuth(double degrees)
    {
        if (!std::isfinite(degrees))
            throw ValidationError("wrap_azimuth: angle must be finite");
        double a = std::fmod(degrees, 360.0);
        if (a < 0.0)
            a += 360.0;
        if (a >= 360.0) // -1e-17 + 360 rounds up to 360
            a = 0.0;
        return Azimuth(a);
    }

    double wrap_signed_deg(double degrees)
    {
        double a = wrap_azimuth(degrees).degrees();
        return a >= 180.0 ? a - 360.0 : a;
    }

    double free_space_delay_ns(double distance_m)
    {
        if (!(distance_m > 0.0) || !std::isfinite(distance_m))
            throw ValidationError("free_space_delay_ns: distance must be positive");
        return distance_m / kSpeedOfLight * 1e9;
    }

    std::string_view to_string(Environment e)
    {
        switch (e)
        {
        case Environment::LOS:
            return "LOS";
        case Environment::NLOS:
            return "NLOS";
        case Environment::NLOS_Best:
            return "NLOS_Best";
        }
        return "?";
    }

    std::string_view to_string(Polarization p)
    {
        return p == Polarization::VV ? "VV" : "VH";
    }

    Environment parse_environment(std::string_view s)
    {
        if (s == "LOS")
            return Environment::LOS;
        if (s == "NLOS")
            return Environment::NLOS;
        if (s == "NLOS_Best" || s == "NLOS-Best")
            return Environment::NLOS_Best;
        throw ValidationError("unknown environment '" + std::string(s) + "'");
    }

    Polarization parse_polarization(std::string_view s)
    {
        if (s == "VV" || s == "V-V")
            return Polarization::VV;
        if (s == "VH" || s == "V-H")
            return Polarization::VH;
        throw ValidationError("unknown polarization '" + std::string(s) + "'");
    }

    std::string_view to_string(BandLabel b)
    {
        switch (b)
        {
        case BandLabel::FR1C:
            return "FR1C";
        case BandLabel::FR3:
            return "FR3";
        case BandLabel::Reference:
            return "reference";
        }
        return "?";
    }

    BandLabel parse_band_label(std::string_view s)
    {
        if (s == "FR1C" || s == "FR1(C)")
            return BandLabel::FR1C;
        if (s == "FR3")
            return BandLabel::FR3;
        if (s == "reference")
            return BandLabel::Reference;
        throw ValidationError("unknown band '" + std::string(s) + "'");
    }

    bool FrequencyBand::sweepable() const noexcept
    {
        if (!(hpbw_deg > 0.0) || hpbw_deg > 360.0)
            return false;
        double steps = 360.0 / hpbw_deg;
        return std::abs(steps - std::round(steps)) < 1e-9;
    }

    int FrequencyBand::azimuth_steps() const
    {
        if (!sweepable())
            throw ValidationError("HPBW does not divide 360 deg");
        return static_cast<int>(std::lround(360.0 / hpbw_deg));
    }

    void validate(const FrequencyBand &band)
    {
        if (!(band.carrier_GHz > 0.0) || !std::isfinite(band.carrier_GHz))
            throw ValidationError("band carrier frequency must be positive");
        if (!(band.hpbw_deg > 0.0) || band.hpbw_deg > 360.0)
            throw ValidationError("band HPBW must be in (0, 360]");
        if (band.label != BandLabel::Reference && !band.sweepable())
            throw ValidationError("HPBW of a sweepable band must divide 360 deg");
    }

    FrequencyBand fr1c_band()
    {
        return {BandLabel::FR1C, 6.75, 30.0, 15.0, 31.0, 156.0};
    }

    FrequencyBand fr3_band()
    {
        return {BandLabel::FR3, 16.95, 15.0, 20.0, 31.0, 159.0};
    }

    FrequencyBand band_by_label(BandLabel label)
    {
        switch (label)
        {
        case BandLabel::FR1C:
            return fr1c_band();
        case BandLabel::FR3:
            return fr3_band();
        default:
            throw ValidationError("no embedded parameters for the reference band");
        }
    }

    int azimuth_grid_index(double azimuth_deg, double step_deg)
    {
        double a = wrap_azimuth(azimuth_deg).degrees();
        double k = std::round(a / step_deg);
        if (std::abs(a - k * step_deg) > 1e-6)
            return -1;
        int n = static_cast<int>(std::lround(360.0 / step_deg));
        return static_cast<int>(k) % n;
    }

    PowerDelayProfile::PowerDelayProfile(double start_delay_ns, double bin_width_ns,
                                         std::vector<double> powers_mW, double noise_floor_dBm)
        : start_(start_delay_ns), bin_(bin_width_ns), powers_(std::move(powers_mW)), floor_dBm_(noise_floor_dBm)
    {
        if (!std::isfinite(start_))
            throw ValidationError("PDP start delay must be finite");
        if (!(bin_ > 0.0) || !std::isfinite(bin_))
            throw ValidationError("PDP bin width must be positive");
        for (double p : powers_)
            if (!(p >= 0.0) || !std::isfinite(p))
                throw ValidationError("PDP powers must be finite and non-negative");
    }

    std::vector<double> PowerDelayProfile::delays_ns() const
    {
        std::vector<double> d(powers_.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = delay_ns(i);
        return d;
    }

    double PowerDelayProfile::total_power_mW() const noexcept
    {
        return std::accumulate(powers_.begin(), powers_.end(), 0.0);
    }

    double PowerDelayProfile::peak_power_mW() const noexcept
    {
        return powers_.empty() ? 0.0 : powers_[peak_index()];
    }

    std::size_t PowerDelayProfile::peak_index() const noexcept
    {
        if (powers_.empty())
            return 0;
        return static_cast<std::size_t>(std::max_element(powers_.begin(), powers_.end()) - powers_.begin());
    }

    bool PowerDelayProfile::same_grid(const PowerDelayProfile &other) const noexcept
    {
        return powers_.size() == other.powers_.size() && std::abs(start_ - other.start_) < 1e-9 &&
               std::abs(bin_ - other.bin_) < 1e-9;
    }

    PowerDelayProfile PowerDelayProfile::with_powers(std::vector<double> powers_mW) const
    {
        return PowerDelayProfile(start_, bin_, std::move(powers_mW), floor_dBm_);
    }

    PowerDelayProfile PowerDelayProfile::with_start_delay(double start_delay_ns) const
    {
        return PowerDelayProfile(start_delay_ns, bin_, powers_, floor_dBm_);
    }

    PowerDelayProfile PowerDelayProfile::with_noise_floor(double noise_floor_dBm) const
    {
        PowerDelayProfile out = *this;
        out.floor_dBm_ = noise_floor_dBm;
        return out;
    }

    PowerDelayProfile circular_shift(const PowerDelayProfile &pdp, long bins)
    {
        const auto n = static_cast<long>(pdp.size());
        if (n == 0)
            return pdp;
        std::vector<double> out(pdp.size());
        auto src = pdp.powers_mW();
        for (long i = 0; i < n; ++i)
        {
            long j = ((i + bins) % n + n) % n;
            out[static_cast<std::size_t>(j)] = src[static_cast<std::size_t>(i)];
        }
        return pdp.with_powers(std::move(out));
    }

    std::vector<std::size_t> local_maxima(std::span<const double> x)
    {
        std::vector<std::size_t> peaks;
        const std::size_t n = x.size();
        std::size_t i = 0;
        while (i < n)
        {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[i])
                ++j;
            double left = i == 0 ? 0.0 : x[i - 1];
            double right = j + 1 >= n ? 0.0 : x[j + 1];
            if (x[i] > 0.0 && x[i] > left && x[i] > right)
                peaks.push_back(i);
            i = j + 1;
        }
        return peaks;
    }

} // namespace midchan
