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

#include "midchan/pathloss.hpp"

#include <array>
#include <cmath>
#include <string>

namespace midchan::pathloss
{
    namespace
    {
        using enum Environment;
        constexpr auto Dir = Aggregation::Directional;
        constexpr auto Omni = Aggregation::Omni;

        // clang-format off
        const std::array<CIParams, 25> kReferenceCi = {{
            {6.75,  LOS,       Dir,  1.55,  2.52}, {6.75,  NLOS_Best, Dir,  2.74,  7.14},
            {6.75,  NLOS,      Dir,  3.05,  9.71}, {6.75,  LOS,       Omni, 1.40,  3.41},
            {6.75,  NLOS,      Omni, 2.42,  7.87},
            {16.95, LOS,       Dir,  1.45,  1.87}, {16.95, NLOS_Best, Dir,  3.52,  9.28},
            {16.95, NLOS,      Dir,  3.93, 14.90}, {16.95, LOS,       Omni, 1.32,  2.66},
            {16.95, NLOS,      Omni, 3.07,  9.03},
            {28.0,  LOS,       Dir,  1.70,  2.90}, {28.0,  NLOS_Best, Dir,  3.30, 10.80},
            {28.0,  NLOS,      Dir,  4.4,  12.10}, {28.0,  LOS,       Omni, 1.2,   1.80},
            {28.0,  NLOS,      Omni, 2.7,   9.70},
            {73.0,  LOS,       Dir,  1.63,  3.06}, {73.0,  NLOS_Best, Dir,  3.30,  8.76},
            {73.0,  NLOS,      Dir,  5.51,  8.94}, {73.0,  LOS,       Omni, 1.36,  2.30},
            {73.0,  NLOS,      Omni, 2.81,  8.71},
            {142.0, LOS,       Dir,  2.05,  2.89}, {142.0, NLOS_Best, Dir,  3.21,  6.03},
            {142.0, NLOS,      Dir,  4.60, 13.80}, {142.0, LOS,       Omni, 1.74,  3.62},
            {142.0, NLOS,      Omni, 2.83,  6.07},
        }};
        // clang-format on
    } // namespace

    std::string_view to_string(Aggregation a)
    {
        return a == Aggregation::Directional ? "directional" : "omni";
    }

    Aggregation parse_aggregation(std::string_view s)
    {
        if (s == "directional" || s == "dir")
            return Aggregation::Directional;
        if (s == "omni")
            return Aggregation::Omni;
        throw ValidationError("unknown aggregation '" + std::string(s) + "'");
    }

    void validate(const CIParams &p)
    {
        if (!(p.carrier_GHz > 0.0))
            throw ValidationError("CI carrier frequency must be positive");
        if (!(p.n > 0.0) || !std::isfinite(p.n))
            throw ValidationError("CI path loss exponent must be positive");
        if (!(p.sigma_dB >= 0.0) || !std::isfinite(p.sigma_dB))
            throw ValidationError("CI shadow fading sigma must be non-negative");
    }

    double fspl_1m(double carrier_GHz)
    {
        if (!(carrier_GHz > 0.0) || !std::isfinite(carrier_GHz))
            throw ValidationError("fspl_1m: carrier frequency must be positive");
        return 32.4 + 20.0 * std::log10(carrier_GHz);
    }

    double ci_predict(const CIParams &p, double distance_m, double shadowing_dB)
    {
        if (!(distance_m >= CIParams::d0_m))
            throw ValidationError("ci_predict: distance below the 1 m reference distance");
        return fspl_1m(p.carrier_GHz) + 10.0 * p.n * std::log10(distance_m / CIParams::d0_m) + shadowing_dB;
    }

    CIParams ci_fit(std::span<const PathLossSample> samples, double carrier_GHz)
    {
        if (samples.empty())
            throw ValidationError("ci_fit: no samples");
        if (samples.size() < 2)
            throw ValidationError("ci_fit: at least two samples are required");

        const double fspl = fspl_1m(carrier_GHz);
        const auto env = samples.front().environment;
        const auto agg = samples.front().aggregation;

        double num = 0.0, den = 0.0;
        for (const auto &s : samples)
        {
            if (!(s.distance_m >= CIParams::d0_m) || !std::isfinite(s.path_loss_dB))
                throw ValidationError("ci_fit: sample distance below 1 m or non-finite path loss");
            if (s.environment != env || s.aggregation != agg)
                throw ValidationError("ci_fit: samples mix environments or aggregations");
            const double D = 10.0 * std::log10(s.distance_m);
            num += (s.path_loss_dB - fspl) * D;
            den += D * D;
        }
        if (den == 0.0)
            throw ComputationError("ci_fit: all samples at the reference distance, slope undefined");

        CIParams p{carrier_GHz, env, agg, num / den, 0.0};
        double ss = 0.0;
        for (const auto &s : samples)
        {
            const double r = s.path_loss_dB - ci_predict(p, s.distance_m);
            ss += r * r;
        }
        p.sigma_dB = std::sqrt(ss / static_cast<double>(samples.size()));
        return p;
    }

    double sample_shadowing(double sigma_dB, std::mt19937_64 &rng)
    {
        if (!(sigma_dB >= 0.0) || !std::isfinite(sigma_dB))
            throw ValidationError("sample_shadowing: sigma must be non-negative");
        if (sigma_dB == 0.0)
            return 0.0;
        return std::normal_distribution<double>(0.0, sigma_dB)(rng);
    }

    double max_range_m(const CIParams &p, double max_path_loss_dB)
    {
        validate(p);
        const double fspl = fspl_1m(p.carrier_GHz);
        if (!(max_path_loss_dB >= fspl))
            throw ValidationError("max_range_m: maximum path loss is below FSPL at 1 m");
        return CIParams::d0_m * std::pow(10.0, (max_path_loss_dB - fspl) / (10.0 * p.n));
    }

    CIParams reference_ci_params(double carrier_GHz, Environment env, Aggregation agg)
    {
        for (const auto &p : kReferenceCi)
            if (std::abs(p.carrier_GHz - carrier_GHz) < 1e-6 && p.environment == env && p.aggregation == agg)
                return p;
        throw ValidationError("no CI parameters for " + std::to_string(carrier_GHz) + " GHz " +
                              std::string(to_string(env)) + " " + std::string(to_string(agg)));
    }

    std::span<const CIParams> reference_ci_table()
    {
        return kReferenceCi;
    }

} // namespace midchan::pathloss
