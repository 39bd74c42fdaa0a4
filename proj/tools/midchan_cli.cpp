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

// midchan command-line tool.
//
// Exit codes: 0 success, 2 usage error, 3 invalid input, 4 computation failure.

#include "midchan/campaign.hpp"
#include "midchan/changen.hpp"
#include "midchan/measproc.hpp"
#include "midchan/pathloss.hpp"
#include "midchan/report.hpp"
#include "midchan/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace midchan;
    namespace fs = std::filesystem;

    constexpr int kExitUsage = 2;
    constexpr int kExitValidation = 3;
    constexpr int kExitComputation = 4;

    // Relative output paths resolve against $MIDCHAN_OUT_DIR when it is set.
    fs::path resolve_out(const std::string &out)
    {
        fs::path p(out);
        if (p.is_relative())
            if (const char *dir = std::getenv("MIDCHAN_OUT_DIR"); dir && *dir)
                p = fs::path(dir) / p;
        return p;
    }

    void emit(const std::string &text, const std::string &out)
    {
        if (out.empty() || out == "-")
            std::cout << text << std::flush;
        else
            io::write_file_atomic(resolve_out(out), text);
    }

    std::string read_text(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw io::CampaignError(io::CampaignErrc::Io, "cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    FrequencyBand band_option(const std::string &label)
    {
        return band_by_label(parse_band_label(label));
    }

    // distance_m,path_loss_dB rows; a non-numeric first row is treated as a header.
    std::vector<pathloss::PathLossSample> read_samples(const std::string &path, Environment env, pathloss::Aggregation agg)
    {
        std::istringstream in(read_text(path));
        std::vector<pathloss::PathLossSample> out;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty() || line[0] == '#')
                continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw ValidationError(path + ":" + std::to_string(lineno) + ": expected distance_m,path_loss_dB");
            try
            {
                const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
                const double d = std::stod(a);
                const double pl = std::stod(b);
                out.push_back({d, pl, env, agg});
            }
            catch (const std::logic_error &)
            {
                if (out.empty() && lineno == 1)
                    continue; // header row
                throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed number");
            }
        }
        return out;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"midchan - mid-band indoor radio channel toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "midchan 0.1.0");

    // fit
    auto *fit = app.add_subcommand("fit", "Fit the close-in path loss model to distance / path loss samples");
    std::string fit_in, fit_env = "LOS", fit_agg = "omni", fit_out;
    double fit_freq = 0.0;
    fit->add_option("input", fit_in, "CSV file with distance_m,path_loss_dB rows")->required();
    fit->add_option("--freq", fit_freq, "Carrier frequency in GHz")->required();
    fit->add_option("--env", fit_env, "Environment label (LOS, NLOS, NLOS_Best)");
    fit->add_option("--agg", fit_agg, "Aggregation label (omni, directional)");
    fit->add_option("-o,--out", fit_out, "Output file (default stdout)");

    // stats
    auto *stats = app.add_subcommand("stats", "Per-location and campaign statistics from a campaign file");
    std::string stats_in, stats_out, stats_pas_dir;
    stats->add_option("campaign", stats_in, "Campaign file (.jsonl)")->required();
    stats->add_option("-o,--out", stats_out, "Output file (default stdout)");
    stats->add_option("--pas-dir", stats_pas_dir, "Also write <location>_pas.csv files into this directory");

    // synth-omni
    auto *synth = app.add_subcommand("synth-omni", "Omnidirectional PDP of one location as CSV");
    std::string synth_in, synth_loc, synth_out;
    bool synth_raw = false;
    synth->add_option("campaign", synth_in, "Campaign file (.jsonl)")->required();
    synth->add_option("--location", synth_loc, "Location id (default: first location)");
    synth->add_flag("--raw", synth_raw, "Skip PDP thresholding");
    synth->add_option("-o,--out", synth_out, "Output file (default stdout)");

    // sweep-plan
    auto *plan = app.add_subcommand("sweep-plan", "Azimuth / tilt sweep schedule of a band");
    std::string plan_band = "FR3", plan_format = "json", plan_out;
    double plan_hpbw = 0.0;
    plan->add_option("--band", plan_band, "Band label (FR1C, FR3)");
    plan->add_option("--hpbw", plan_hpbw, "Override the antenna HPBW in degrees");
    plan->add_option("--format", plan_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    plan->add_option("-o,--out", plan_out, "Output file (default stdout)");

    // simulate-sounder
    auto *sim = app.add_subcommand("simulate-sounder", "Simulate a sounder campaign from a scenario file");
    std::string sim_in, sim_out;
    sim->add_option("scenario", sim_in, "Scenario JSON file")->required();
    sim->add_option("-o,--out", sim_out, "Campaign output file (default stdout)");

    // generate
    auto *gen = app.add_subcommand("generate", "Generate statistical channel drops");
    std::string gen_band = "FR3", gen_env = "LOS", gen_pol = "VV", gen_out, gen_summary;
    std::size_t gen_n = 100;
    std::uint64_t gen_seed = 1;
    double gen_distance = 0.0;
    bool gen_cdf = false;
    gen->add_option("--band", gen_band, "Band label (FR1C, FR3)");
    gen->add_option("--env", gen_env, "Environment (LOS, NLOS)");
    gen->add_option("--pol", gen_pol, "Polarization (VV, VH)");
    gen->add_option("--n", gen_n, "Number of drops")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Base seed");
    gen->add_option("--distance", gen_distance, "Fixed T-R distance in m (default: uniform 11-97 m)");
    gen->add_flag("--cdf", gen_cdf, "Include empirical CDFs in the summary");
    gen->add_option("-o,--out", gen_out, "Write the drops as a campaign file");
    gen->add_option("--summary", gen_summary, "Summary JSON output file (default stdout)");

    // export-params
    auto *params = app.add_subcommand("export-params", "Embedded reference parameters as JSON");
    double par_freq = 0.0;
    std::string par_env, par_agg, par_out;
    params->add_option("--freq", par_freq, "Carrier frequency in GHz");
    params->add_option("--env", par_env, "Environment (LOS, NLOS, NLOS_Best)");
    params->add_option("--agg", par_agg, "Aggregation (omni, directional)");
    params->add_option("-o,--out", par_out, "Output file (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try
    {
        if (*fit)
        {
            const auto env = parse_environment(fit_env);
            const auto agg = pathloss::parse_aggregation(fit_agg);
            const auto samples = read_samples(fit_in, env, agg);
            emit(report::ci_fit_json(pathloss::ci_fit(samples, fit_freq), samples.size()), fit_out);
        }
        else if (*stats)
        {
            const auto campaign = io::load_campaign(stats_in);
            emit(report::to_json(report::build_stats_report(campaign)), stats_out);
            if (!stats_pas_dir.empty())
            {
                const fs::path dir = resolve_out(stats_pas_dir);
                fs::create_directories(dir);
                for (const auto &set : campaign.capture_sets())
                {
                    std::vector<PowerDelayProfile> thr;
                    for (const auto &r : set.records())
                        thr.push_back(measproc::apply_threshold(r.pdp));
                    const auto pas = measproc::build_pas(set.with_pdps(std::move(thr)), measproc::PasSide::AOA);
                    io::write_file_atomic(dir / (set.location_id() + "_pas.csv"), report::pas_csv(pas));
                }
            }
        }
        else if (*synth)
        {
            const auto campaign = io::load_campaign(synth_in);
            const auto sets = campaign.capture_sets();
            if (sets.empty())
                throw ValidationError("campaign has no records");
            const measproc::DirectionalCaptureSet *set = &sets.front();
            if (!synth_loc.empty())
            {
                set = nullptr;
                for (const auto &s : sets)
                    if (s.location_id() == synth_loc)
                        set = &s;
                if (!set)
                    throw ValidationError("no records for location '" + synth_loc + "'");
            }
            std::vector<PowerDelayProfile> pdps;
            for (const auto &r : set->records())
                pdps.push_back(synth_raw ? r.pdp : measproc::apply_threshold(r.pdp));
            emit(report::pdp_csv(measproc::synthesize_omni_pdp(set->with_pdps(std::move(pdps)))), synth_out);
        }
        else if (*plan)
        {
            auto band = band_option(plan_band);
            if (plan->count("--hpbw"))
                band.hpbw_deg = plan_hpbw;
            const auto p = changen::plan_sweeps(band);
            emit(plan_format == "csv" ? report::sweep_plan_csv(p) : report::sweep_plan_json(p), plan_out);
        }
        else if (*sim)
        {
            const auto result = scenario::simulate(scenario::parse_scenario(read_text(sim_in)));
            emit(io::serialize_campaign(result.campaign), sim_out);
        }
        else if (*gen)
        {
            changen::DropConfig cfg;
            cfg.band = band_option(gen_band);
            cfg.environment = parse_environment(gen_env);
            cfg.polarization = parse_polarization(gen_pol);
            cfg.seed = gen_seed;
            if (gen->count("--distance"))
                cfg.distance_m = gen_distance;
            const auto drops = changen::generate_drops(cfg, gen_n);
            if (!gen_out.empty())
                io::save_campaign(report::campaign_from_drops(drops, "synthetic"), resolve_out(gen_out));
            emit(report::drops_json(drops, gen_cdf), gen_summary);
        }
        else if (*params)
        {
            std::optional<double> f;
            std::optional<Environment> env;
            std::optional<pathloss::Aggregation> agg;
            if (params->count("--freq"))
                f = par_freq;
            if (!par_env.empty())
                env = parse_environment(par_env);
            if (!par_agg.empty())
                agg = pathloss::parse_aggregation(par_agg);
            emit(report::params_json(f, env, agg), par_out);
        }
    }
    catch (const io::CampaignError &e)
    {
        std::cerr << "error [" << io::to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitValidation;
    }
    catch (const ValidationError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    catch (const ComputationError &e)
    {
        std::cerr << "computation failed: " << e.what() << '\n';
        return kExitComputation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "computation failed: " << e.what() << '\n';
        return kExitComputation;
    }
    return 0;
}
