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

// Python bindings: the main library operations on plain Python values.

#include "midchan/campaign.hpp"
#include "midchan/changen.hpp"
#include "midchan/measproc.hpp"
#include "midchan/pathloss.hpp"
#include "midchan/report.hpp"
#include "midchan/sounder.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace midchan;

namespace
{
    PowerDelayProfile make_pdp(std::vector<double> powers_mW, double start_ns, double bin_ns, double floor_dBm)
    {
        return PowerDelayProfile(start_ns, bin_ns, std::move(powers_mW), floor_dBm);
    }

    py::dict stats_dict(const measproc::ChannelStats &s)
    {
        py::dict d;
        d["location_id"] = s.location_id;
        d["omni_pl_dB"] = s.omni_pl_dB;
        d["omni_rms_ds_ns"] = s.omni_rms_ds_ns;
        d["mean_excess_delay_ns"] = s.mean_excess_delay_ns;
        d["omni_asa_deg"] = s.omni_as_deg;
        d["lobe_asa_deg"] = s.lobe_as_deg;
        d["directional_rms_ds_ns"] = s.directional_rms_ds_ns;
        d["directional_pl_dB"] = s.directional_pl_dB;
        d["best_directional_pl_dB"] = s.best_directional_pl_dB;
        return d;
    }
} // namespace

PYBIND11_MODULE(_midchan, m)
{
    m.doc() = "Mid-band indoor radio channel toolkit";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ComputationError>(m, "ComputationError", PyExc_ArithmeticError);

    // path loss
    m.def("fspl_1m", &pathloss::fspl_1m, py::arg("carrier_GHz"), "Free-space path loss at 1 m, dB.");
    m.def(
        "ci_predict",
        [](double fc, double n, double d, double shadow) {
            pathloss::CIParams p;
            p.carrier_GHz = fc;
            p.n = n;
            return pathloss::ci_predict(p, d, shadow);
        },
        py::arg("carrier_GHz"), py::arg("n"), py::arg("distance_m"), py::arg("shadowing_dB") = 0.0,
        "Close-in model path loss, dB.");
    m.def(
        "ci_fit",
        [](const std::vector<double> &d, const std::vector<double> &pl, double fc) {
            if (d.size() != pl.size())
                throw ValidationError("ci_fit: distance and path loss lengths differ");
            std::vector<pathloss::PathLossSample> s;
            for (std::size_t i = 0; i < d.size(); ++i)
                s.push_back({d[i], pl[i], Environment::LOS, pathloss::Aggregation::Omni});
            const auto p = pathloss::ci_fit(s, fc);
            return py::make_tuple(p.n, p.sigma_dB);
        },
        py::arg("distance_m"), py::arg("path_loss_dB"), py::arg("carrier_GHz"),
        "Least-squares close-in fit; returns (n, sigma_dB).");
    m.def(
        "reference_ci_params",
        [](double fc, const std::string &env, const std::string &agg) {
            const auto p = pathloss::reference_ci_params(fc, parse_environment(env), pathloss::parse_aggregation(agg));
            return py::make_tuple(p.n, p.sigma_dB);
        },
        py::arg("carrier_GHz"), py::arg("environment"), py::arg("aggregation"),
        "Embedded (n, sigma_dB) for a frequency / environment / aggregation.");
    m.def(
        "max_range_m",
        [](double fc, double n, double max_pl) {
            pathloss::CIParams p;
            p.carrier_GHz = fc;
            p.n = n;
            return pathloss::max_range_m(p, max_pl);
        },
        py::arg("carrier_GHz"), py::arg("n"), py::arg("max_path_loss_dB"));

    // measurement processing
    m.def(
        "rms_delay_spread",
        [](std::vector<double> p, double start, double bin) {
            return measproc::rms_delay_spread(make_pdp(std::move(p), start, bin, kNumericFloorDbm));
        },
        py::arg("powers_mW"), py::arg("start_delay_ns") = 0.0, py::arg("bin_width_ns") = 1.0);
    m.def(
        "threshold_pdp",
        [](std::vector<double> p, double floor_dBm) {
            const auto out = measproc::threshold_pdp(make_pdp(std::move(p), 0.0, 1.0, floor_dBm));
            return std::vector<double>(out.powers_mW().begin(), out.powers_mW().end());
        },
        py::arg("powers_mW"), py::arg("noise_floor_dBm"),
        "Zeroes bins below max(floor + 5 dB, peak - 25 dB).");
    m.def("circular_rms_spread_deg", [](const std::vector<double> &a, const std::vector<double> &p) {
        return measproc::circular_rms_spread_deg(a, p);
    }, py::arg("angles_deg"), py::arg("powers"));
    m.def(
        "omni_angular_spread",
        [](std::vector<double> pas, double step) {
            return measproc::angular_spread(measproc::PowerAngularSpectrum{measproc::PasSide::AOA, step, std::move(pas)},
                                            measproc::SpreadMode::Omni);
        },
        py::arg("pas_mW"), py::arg("step_deg"));

    // sounder
    m.def(
        "gen_pn",
        [](int order) {
            const auto pn = sounder::gen_pn(order);
            return std::vector<int>(pn.chips.begin(), pn.chips.end());
        },
        py::arg("order") = 11, "Maximal-length PN chips (+1/-1).");
    m.def(
        "dilation_factor",
        [](double fast, double slow) { return sounder::dilation_factor({fast, slow}); },
        py::arg("fast_rate_Mcps") = 500.0, py::arg("slow_rate_Mcps") = 499.9375);

    // planning and generation
    m.def(
        "plan_sweeps",
        [](const std::string &band) {
            py::list rows;
            for (const auto &r : changen::plan_sweeps(band_by_label(parse_band_label(band))).rows)
                rows.append(py::make_tuple(r.sweep_index, r.tx_tilt, r.rx_tilt, r.rx_azimuth_steps));
            return rows;
        },
        py::arg("band"), "Rows of (sweep, tx_tilt, rx_tilt, rx_azimuth_steps).");
    m.def(
        "select_aods",
        [](const std::vector<double> &aods, const std::vector<double> &peaks, double floor) {
            if (aods.size() != peaks.size())
                throw ValidationError("select_aods: lengths differ");
            std::vector<changen::AodPeak> in;
            for (std::size_t i = 0; i < aods.size(); ++i)
                in.push_back({wrap_azimuth(aods[i]), peaks[i]});
            std::vector<double> out;
            for (const auto &a : changen::select_aods(in, floor))
                out.push_back(a.aod.degrees());
            return out;
        },
        py::arg("aod_deg"), py::arg("peak_dBm"), py::arg("noise_floor_dBm"));
    m.def(
        "generate_drop",
        [](const std::string &band, const std::string &env, std::uint64_t seed, std::optional<double> distance) {
            changen::DropConfig cfg;
            cfg.band = band_by_label(parse_band_label(band));
            cfg.environment = parse_environment(env);
            cfg.seed = seed;
            cfg.distance_m = distance;
            const auto d = changen::generate_drop(cfg);
            py::dict out = stats_dict(d.realized);
            out["distance_m"] = d.distance_m;
            out["path_loss_dB"] = d.path_loss_dB;
            out["target_rms_ds_ns"] = d.target_rms_ds_ns;
            out["target_asa_deg"] = d.target_asa_deg;
            return out;
        },
        py::arg("band"), py::arg("environment"), py::arg("seed") = 0, py::arg("distance_m") = py::none());

    // files and reports
    m.def(
        "export_params",
        [](std::optional<double> fc, std::optional<std::string> env, std::optional<std::string> agg) {
            std::optional<Environment> e;
            std::optional<pathloss::Aggregation> a;
            if (env)
                e = parse_environment(*env);
            if (agg)
                a = pathloss::parse_aggregation(*agg);
            return report::params_json(fc, e, a);
        },
        py::arg("carrier_GHz") = py::none(), py::arg("environment") = py::none(), py::arg("aggregation") = py::none(),
        "Embedded reference parameters as JSON text.");
    m.def(
        "campaign_stats",
        [](const std::string &path) { return report::to_json(report::build_stats_report(io::load_campaign(path))); },
        py::arg("path"), "Statistics report (JSON text) for a campaign file.");
}
