#include "upbv/families.hpp"
#include "upbv/io.hpp"
#include "upbv/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

using namespace upbv;

TEST_CASE("state-set JSON round trip is lossless") {
    const auto set = upb_444();
    const json j = state_set_to_json(set);
    REQUIRE(j.at("convention") == "last-party-fastest");
    const StateSet back = state_set_from_json(j);
    REQUIRE(back.dims == set.dims);
    REQUIRE(back.states.size() == set.states.size());
    for (std::size_t i = 0; i < set.states.size(); ++i) {
        REQUIRE(back.states[i].label == set.states[i].label);
        for (std::size_t f = 0; f < set.states[i].factors.size(); ++f)
            REQUIRE((back.states[i].factors[f] - set.states[i].factors[f]).norm() <= 1e-15);
    }

    SECTION("file round trip through dump/parse") {
        namespace fs = std::filesystem;
        const auto path = fs::temp_directory_path() / "upbv_io_test.json";
        save_state_set(path.string(), set);
        const StateSet loaded = load_state_set(path.string());
        REQUIRE(same_ray_set(loaded, set, 1e-15));
        fs::remove(path);
    }
}

TEST_CASE("schema errors are reported as invalid input") {
    REQUIRE_THROWS_AS(state_set_from_json(json{{"name", "x"}}), std::invalid_argument);
    json j = state_set_to_json(tiles_34());
    j["states"][0]["factors"][0] = json::array();  // now an empty factor
    REQUIRE_THROWS_AS(state_set_from_json(j), std::domain_error);
    j = state_set_to_json(tiles_34());
    j["convention"] = "first-party-fastest";
    REQUIRE_THROWS_AS(state_set_from_json(j), std::invalid_argument);
}

TEST_CASE("run report verdicts and exit codes") {
    RunReport rep;
    rep.set_name = "x";
    rep.checks.push_back({"a", "PASS", "", 0.0});
    REQUIRE(rep.exit_code() == 0);
    rep.checks.push_back({"b", "INCONCLUSIVE", "", 0.0});
    REQUIRE(rep.exit_code() == 2);
    rep.checks.push_back({"c", "FAIL", "", 0.0});
    REQUIRE(rep.exit_code() == 1);
    const json j = rep.to_json();
    REQUIRE(j.at("checks").size() == 3);
    REQUIRE(j.at("tolerances").contains("gap_min"));
}

TEST_CASE("csv column order is pinned") {
    REQUIRE(csv_header() ==
            "d,family,size,expected,orth,upb,opm_bc_dim,opm_ca_dim,opm_ab_dim,min_gap,ppt_min,secs");
    ReportRow row;
    row.d = 3;
    row.family = "ddd";
    row.size = 19;
    row.expected = 19;
    row.orth = "PASS";
    row.upb = "PASS";
    row.opm_bc = row.opm_ca = row.opm_ab = "1";
    row.min_gap = 1e14;
    row.ppt_min = 0.0;
    row.secs = 0.25;
    const std::string line = csv_line(row);
    REQUIRE(line.rfind("3,ddd,19,19,PASS,PASS,1,1,1,", 0) == 0);
}

TEST_CASE("check runners produce the contract verdict strings") {
    const auto orth = run_orth_check(upb_333(), Tolerances{});
    REQUIRE(orth.verdict == "PASS");
    const auto upb = run_upb_check(tiles_34(), Tolerances{});
    REQUIRE(upb.verdict == "PASS");
    const auto strong = run_strong_check(tiles_34(), Tolerances{}, true, 1);
    REQUIRE(strong.size() == 2);
    REQUIRE(strong[0].name == "strong_A");
    REQUIRE(strong[0].verdict == "PASS");      // measuring A alone is trivial
    REQUIRE(strong[1].verdict == "FAIL");      // B admits the |3><3| measurement
    const auto ppt = run_ppt_check(upb_333(), Tolerances{}, true);
    REQUIRE(ppt.verdict == "PASS");
}
