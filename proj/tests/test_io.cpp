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

#include "midchan/campaign.hpp"
#include "midchan/report.hpp"
#include "fixtures.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace midchan;
using namespace midchan::io;

namespace
{
    const char *const kHeader =
        R"({"kind":"header","format_version":1,"band":{"label":"FR3","carrier_GHz":16.95,"hpbw_deg":15,)"
        R"("antenna_gain_dBi":20,"eirp_dBm":31,"link_margin_dB":159},"site":"lab","tx_height_m":2.4,)"
        R"("rx_height_m":1.5,"polarization":"VV","tx_power_dBm":11,)"
        R"("locations":[{"id":"RX1","distance_m":11.2,"environment":"LOS"}]})";

    std::string record_line(double rx_az, const std::string &band = "FR3", const std::string &loc = "RX1")
    {
        return R"({"kind":"record","location_id":")" + loc + R"(","band":")" + band +
               R"(","polarization":"VV","tx_azimuth_deg":0,"tx_tilt":0,"rx_azimuth_deg":)" + std::to_string(rx_az) +
               R"(,"rx_tilt":0,"tx_gain_dBi":20,"rx_gain_dBi":20,"wall_time_s":12.5,)"
               R"("pdp":{"start_delay_ns":30,"bin_width_ns":1,"noise_floor_dBm":-95,)"
               R"("powers_dBm":[null,-60,-70.5,null]}})";
    }

    const char *const kFooter = R"({"kind":"footer","calibration":[]})";

    CampaignFile parse_text(const std::string &text)
    {
        std::istringstream in(text);
        return parse_campaign(in);
    }

    CampaignErrc error_code(const std::string &text)
    {
        try
        {
            parse_text(text);
        }
        catch (const CampaignError &e)
        {
            return e.code();
        }
        FAIL("campaign unexpectedly loaded");
        return CampaignErrc::Io;
    }

    std::string lines(std::initializer_list<std::string> l)
    {
        std::string out;
        for (const auto &s : l)
            out += s + "\n";
        return out;
    }

    std::filesystem::path scratch_dir()
    {
        auto dir = std::filesystem::temp_directory_path() / ("midchan-io-test-" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
        return dir;
    }
} // namespace

TEST_SUITE("io")
{
    TEST_CASE("minimal campaign loads")
    {
        const auto c = parse_text(lines({kHeader, record_line(45), kFooter}));
        CHECK(c.header.band == fr3_band());
        CHECK(c.header.tx_height_m == 2.4);
        CHECK(c.header.rx_height_m == 1.5);
        REQUIRE(c.records.size() == 1);
        const auto &r = c.records[0];
        CHECK(r.rx_azimuth.degrees() == 45.0);
        CHECK(r.pdp.size() == 4);
        CHECK(r.pdp.power_mW(0) == 0.0);
        CHECK(r.pdp.power_mW(1) == doctest::Approx(1e-6));
        CHECK(r.pdp.start_delay_ns() == 30.0);
        CHECK(c.location("RX1")->distance_m == 11.2);
        CHECK(c.location("nope") == nullptr);
    }

    TEST_CASE("each invariant violation has its own error code")
    {
        CHECK(error_code(lines({kHeader, record_line(17), kFooter})) == CampaignErrc::GridViolation);
        CHECK(error_code(lines({kHeader, record_line(45), record_line(45), kFooter})) ==
              CampaignErrc::DuplicateRecord);
        CHECK(error_code(lines({kHeader, record_line(45, "FR1C"), kFooter})) == CampaignErrc::BandMismatch);

        std::string v2 = kHeader;
        v2.replace(v2.find("\"format_version\":1"), 18, "\"format_version\":2");
        CHECK(error_code(lines({v2, record_line(45), kFooter})) == CampaignErrc::VersionMismatch);

        CHECK(error_code(lines({kHeader, "{not json", kFooter})) == CampaignErrc::Parse);
        CHECK(error_code(lines({kHeader, record_line(45)})) == CampaignErrc::Schema);
        CHECK(error_code(lines({kHeader, record_line(45, "FR3", "RX9"), kFooter})) == CampaignErrc::Schema);
        CHECK(error_code("") == CampaignErrc::Schema);

        try
        {
            load_campaign("/nonexistent/dir/campaign.jsonl");
            FAIL("loaded a missing file");
        }
        catch (const CampaignError &e)
        {
            CHECK(e.code() == CampaignErrc::Io);
        }
        CHECK(to_string(CampaignErrc::GridViolation) != to_string(CampaignErrc::DuplicateRecord));
    }

    TEST_CASE("save and load round-trip")
    {
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 100; ++trial)
        {
            const auto c = fixture::random_campaign(rng);
            const std::string f1 = serialize_campaign(c);
            const auto c1 = parse_text(f1);

            // Everything except the stored powers is carried exactly; powers go through dBm text.
            CHECK(c1.header == c.header);
            CHECK(c1.calibration == c.calibration);
            REQUIRE(c1.records.size() == c.records.size());
            for (std::size_t i = 0; i < c.records.size(); ++i)
            {
                auto a = c.records[i], b = c1.records[i];
                for (std::size_t k = 0; k < a.pdp.size(); ++k)
                    CHECK(b.pdp.power_mW(k) == doctest::Approx(a.pdp.power_mW(k)).epsilon(1e-14));
                a.pdp = a.pdp.with_powers(std::vector<double>(b.pdp.powers_mW().begin(), b.pdp.powers_mW().end()));
                CHECK(a == b);
            }

            // On loaded data the round trip is exact, and the text is reproduced byte for byte.
            const std::string f2 = serialize_campaign(c1);
            CHECK(f2 == f1);
            CHECK(equivalent(parse_text(f2), c1));
        }
    }

    TEST_CASE("missing noise floors survive the round trip")
    {
        std::mt19937_64 rng(2);
        auto c = fixture::random_campaign(rng);
        c.records[0].pdp = c.records[0].pdp.with_noise_floor(NAN);
        const auto c1 = parse_text(serialize_campaign(c));
        CHECK(std::isnan(c1.records[0].pdp.noise_floor_dBm()));
        CHECK(equivalent(c1, parse_text(serialize_campaign(c1))));
    }

    TEST_CASE("atomic save")
    {
        std::mt19937_64 rng(3);
        const auto c = fixture::random_campaign(rng);
        const auto dir = scratch_dir();
        const auto path = dir / "campaign.jsonl";
        save_campaign(c, path);
        CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
        const auto loaded = load_campaign(path);
        CHECK(serialize_campaign(loaded) == serialize_campaign(c));

        auto bad = c;
        bad.records.push_back(bad.records.front());
        CHECK_THROWS_AS(save_campaign(bad, dir / "bad.jsonl"), CampaignError);
        CHECK_FALSE(std::filesystem::exists(dir / "bad.jsonl"));
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("stats report regenerates byte-identically from a saved campaign")
    {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 20; ++trial)
        {
            const auto c1 = parse_text(serialize_campaign(fixture::random_campaign(rng)));
            const auto r1 = report::to_json(report::build_stats_report(c1));
            const auto c2 = parse_text(serialize_campaign(c1));
            CHECK(report::to_json(report::build_stats_report(c2)) == r1);

            const auto j = nlohmann::json::parse(r1);
            CHECK(j.at("locations").size() == c1.header.locations.size());
            CHECK(j.contains("provenance"));
        }
    }

    TEST_CASE("CSV exports")
    {
        const auto pdp = PowerDelayProfile(10.0, 0.5, {1e-6, 0.0, 1e-7}, -100.0);
        CHECK(report::pdp_csv(pdp) == "delay_ns,power_dBm\n10,-60\n10.5,\n11,-70\n");

        measproc::PowerAngularSpectrum pas;
        pas.step_deg = 30.0;
        pas.powers_mW = {1.0, 0.01};
        CHECK(report::pas_csv(pas) == "azimuth_deg,power_dBm\n0,0\n30,-20\n");

        const auto csv = report::sweep_plan_csv(changen::plan_sweeps(fr3_band()));
        CHECK(csv == "sweep,tx_tilt,rx_tilt,rx_azimuth_steps\n1,0,0,24\n2,0,-1,24\n3,0,1,24\n4,-1,0,24\n5,-1,-1,24\n");
    }

    TEST_CASE("parameter export")
    {
        CHECK(nlohmann::json::parse(report::params_json(6.75, Environment::LOS, pathloss::Aggregation::Omni)) ==
              nlohmann::json::parse(R"({"n":1.40,"sigma_dB":3.41})"));
        const auto all = nlohmann::json::parse(report::params_json({}, {}, {}));
        CHECK(all.at("ci_path_loss").size() == 25);
        CHECK(all.at("rms_delay_spread").size() == 20); // five frequencies x dir/omni x LOS/NLOS
        CHECK(all.at("omni_asa").size() == 4);
        CHECK(all.at("bands").size() == 2);
        const auto some = nlohmann::json::parse(report::params_json(16.95, {}, {}));
        CHECK(some.at("ci_path_loss").size() == 5);
        CHECK(some.at("rms_delay_spread").size() == 4);
        CHECK_THROWS_AS(report::params_json(5.0, Environment::LOS, pathloss::Aggregation::Omni), ValidationError);
    }

    TEST_CASE("number formatting is locale independent and round-trips")
    {
        CHECK(report::format_number(0.1) == "0.1");
        CHECK(report::format_number(-61.03) == "-61.03");
        CHECK(report::format_number(1e-300) == "1e-300");
        CHECK(report::format_number(NAN) == "nan");
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        for (int i = 0; i < 1000; ++i)
        {
            const double x = u(rng);
            CHECK(std::stod(report::format_number(x)) == x);
        }
    }

    TEST_CASE("campaigns built from drops are valid")
    {
        changen::DropConfig cfg;
        cfg.band = fr1c_band();
        cfg.environment = Environment::NLOS;
        cfg.location_id = "d";
        const auto drops = changen::generate_drops(cfg, 5);
        const auto c = report::campaign_from_drops(drops, "synthetic");
        CHECK(c.header.locations.size() == 5);
        CHECK(c.capture_sets().size() == 5);
        const auto c1 = parse_text(serialize_campaign(c));
        const auto rep = report::build_stats_report(c1);
        REQUIRE(rep.locations.size() == 5);
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(rep.locations[i].omni_rms_ds_ns == doctest::Approx(drops[i].realized.omni_rms_ds_ns).epsilon(1e-9));
    }
}
