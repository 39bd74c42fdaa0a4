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

#ifndef MIDCHAN_PATHLOSS_HPP
#define MIDCHAN_PATHLOSS_HPP

#include "midchan/core.hpp"

#include <random>
#include <span>
#include <vector>

// Close-in (CI) free-space reference distance path loss model:
//
//   PL(fc, d) [dB] = FSPL(fc, 1 m) + 10 n log10(d / 1 m) + X_sigma
//   FSPL(fc, 1 m)  = 32.4 + 20 log10(fc / 1 GHz)
//
// with X_sigma a zero-mean Gaussian shadowing term of standard deviation sigma (dB).

namespace midchan::pathloss
{
    enum class Aggregation
    {
        Directional,
        Omni
    };

    std::string_view to_string(Aggregation a);
    Aggregation parse_aggregation(std::string_view s);

    struct CIParams
    {
        double carrier_GHz = 0.0;
        Environment environment = Environment::LOS;
        Aggregation aggregation = Aggregation::Omni;
        double n = 2.0;        // path loss exponent
        double sigma_dB = 0.0; // shadow fading standard deviation
        static constexpr double d0_m = 1.0;

        friend bool operator==(const CIParams &, const CIParams &) = default;
    };

    void validate(const CIParams &p);

    struct PathLossSample
    {
        double distance_m = 0.0;
        double path_loss_dB = 0.0;
        Environment environment = Environment::LOS;
        Aggregation aggregation = Aggregation::Omni;
    };

    double fspl_1m(double carrier_GHz);

    // Throws ValidationError for distances below the 1 m reference.
    double ci_predict(const CIParams &p, double distance_m, double shadowing_dB = 0.0);

    // Closed-form MMSE fit of the single PLE through the FSPL 1 m anchor:
    //   n = sum((PL_i - FSPL) D_i) / sum(D_i^2),  D_i = 10 log10(d_i)
    // sigma is the RMS of the residuals (no Bessel correction). Environment and aggregation are
    // taken from the samples, which must agree on both.
    CIParams ci_fit(std::span<const PathLossSample> samples, double carrier_GHz);

    // Draws X_sigma ~ N(0, sigma^2).
    double sample_shadowing(double sigma_dB, std::mt19937_64 &rng);

    // Largest distance at which the model (without shadowing) stays within max_path_loss_dB.
    double max_range_m(const CIParams &p, double max_path_loss_dB);

    // Embedded directional / omni CI parameters for 6.75, 16.95, 28, 73 and 142 GHz indoor campaigns.
    CIParams reference_ci_params(double carrier_GHz, Environment env, Aggregation agg);

    // Every embedded (frequency, environment, aggregation) entry, in table order.
    std::span<const CIParams> reference_ci_table();

} // namespace midchan::pathloss

#endif
