#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coordsim/cli/config.hpp"
#include "coordsim/cli/runner.hpp"
#include "coordsim/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::cli;

namespace {

const char* kTwoNode = R"({
  "kind": "simulate-two-node",
  "target": {
    "topology": "two-node",
    "pmf": [0.5, 0.5],
    "conditionals": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
  },
  "rates": {"R0": 0.25, "R1": 1.25},
  "n_list": [1, 2, 3]
})";

const char* kResolvability = R"({
  "kind": "resolvability",
  "ensemble": {
    "pmf": [0.5, 0.5],
    "states": [[[1, 0], [0, 0]], [[0.5, 0.5], [0.5, 0.5]]]
  },
  "rates": {"R": 1.0},
  "n_list": [2, 3, 4, 5, 6, 7, 8],
  "trials": 3
})";

const char* kBell = R"({
  "kind": "region-nc",
  "target": {
    "topology": "no-comm",
    "registers": [2, 2, 1],
    "state": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]
  }
})";

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

Json matrix2(double a, double b, double c, double d) { return Json::array({Json::array({a, b}), Json::array({c, d})}); }

// Random valid config of any kind, built as JSON.
Json generated_config(Stream& rng) {
  const auto& kinds = kind_names();
  const std::string kind = kinds[rng.next() % kinds.size()];
  Json j;
  j["kind"] = kind;
  j["seed"] = rng.next() % 100000;
  if (rng.uniform() < 0.5) j["threads"] = 1 + rng.next() % 4;
  const double p = 0.1 + 0.8 * rng.uniform();
  if (kind == "resolvability") {
    j["ensemble"] = Json{{"pmf", {p, 1 - p}}, {"states", {matrix2(1, 0, 0, 0), matrix2(0.5, 0.5, 0.5, 0.5)}}};
    j["rates"] = Json{{"R", 2.0 * rng.uniform()}};
    j["n_list"] = {1, 2};
    j["trials"] = 2 + rng.next() % 5;
    return j;
  }
  if (kind == "simulate-nc" || kind == "region-nc") {
    Json state = Json::array();
    for (int r = 0; r < 8; ++r) {
      Json row = Json::array();
      for (int c = 0; c < 8; ++c) row.push_back(r == c && (r == 0 || r == 7) ? 0.5 : 0.0);
      state.push_back(row);
    }
    j["target"] = Json{{"topology", "no-comm"}, {"registers", {2, 2, 2}}, {"state", state}};
    if (kind == "simulate-nc") {
      j["rates"] = Json{{"R0", 1.3}};
      j["n_list"] = {1, 2};
    }
    return j;
  }
  if (kind == "simulate-broadcast" || kind == "region-broadcast") {
    Json c0 = Json::array(), c1 = Json::array();
    for (int r = 0; r < 4; ++r) {
      Json row0 = Json::array(), row1 = Json::array();
      for (int c = 0; c < 4; ++c) {
        row0.push_back(r == c && r == 0 ? 1.0 : 0.0);
        row1.push_back(r == c && r == 3 ? 1.0 : 0.0);
      }
      c0.push_back(row0);
      c1.push_back(row1);
    }
    j["target"] = Json{{"topology", "broadcast"}, {"pmf", {p, 1 - p}}, {"conditionals", {c0, c1}}};
  } else {
    const double q = rng.uniform();
    j["target"] = Json{{"topology", "two-node"},
                       {"pmf", {p, 1 - p}},
                       {"conditionals", {matrix2(q, 0, 0, 1 - q), matrix2(1 - q, 0, 0, q)}}};
  }
  if (kind.rfind("simulate", 0) == 0) {
    j["rates"] = Json{{"R0", rng.uniform()}, {"R1", 1.0 + rng.uniform()}};
    j["n_list"] = {1, 2, 3};
    j["trials"] = 2 + rng.next() % 5;
  }
  if (kind.rfind("region", 0) == 0) {
    j["r0_grid"] = {0.0, 0.5 * rng.uniform(), 1.0};
    j["region_variant"] = rng.uniform() < 0.5 ? "proof" : "printed";
    j["region"] = Json{{"restarts", 1 + rng.next() % 3}, {"max_u", 2}, {"iterations", 20}};
  }
  if (kind == "oracle") j["oracle"] = Json{{"max_u", 2}, {"grid_step", 0.125}, {"objective", "first"}};
  if (rng.uniform() < 0.3) j["caps"] = Json{{"max_blocks", 1024}};
  if (rng.uniform() < 0.3) j["tolerances"] = Json{{"feasibility", 1e-5}};
  return j;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("coordsim-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("minimal two-node config parses with defaults") {
    const auto c = parse_config(kTwoNode);
    CHECK(c.kind == ExperimentKind::SimulateTwoNode);
    CHECK(c.seed == 0);
    CHECK(c.trials == 50);
    CHECK_FALSE(c.extension.has_value());
    CHECK(c.region_variant == RegionVariant::Proof);
    CHECK(c.caps == Caps{});
    CHECK(c.tolerances == Tolerances{});
    CHECK(*c.rates.r1 == 1.25);
    CHECK(c.n_list == std::vector<std::size_t>{1, 2, 3});
    const auto echo = serialize_config(c);
    CHECK(echo["extension"] == "auto");
    CHECK(echo["seed"] == 0);
  }

  TEST_CASE("negative rate") {
    Json j = Json::parse(kTwoNode);
    j["rates"]["R1"] = -0.5;
    try {
      parse_config(j.dump());
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "R1");
      CHECK(e.reason() == "nonnegative");
    }
  }

  TEST_CASE("malformed and unknown input") {
    try {
      parse_config("{\n  \"kind\": \"info\",\n  oops\n}");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    Json j = Json::parse(kTwoNode);
    j["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j = Json::parse(kTwoNode);
    j["target"]["topology"] = "broadcast";
    CHECK_THROWS_AS(parse_config(j.dump()), Error);
    j = Json::parse(kTwoNode);
    j.erase("n_list");
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j = Json::parse(kResolvability);
    j["trials"] = 1;
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j = Json::parse(kTwoNode);
    j["target"]["conditionals"][0] = Json::parse("[[1, 0], [0, 1]]");
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
  }

  TEST_CASE("serialize and parse round trip over generated configs") {
    Stream rng(163);
    for (int k = 0; k < 60; ++k) {
      const Json j = generated_config(rng);
      CAPTURE(j.dump());
      const auto c = parse_config(j.dump());
      const auto again = parse_config(serialize_config(c).dump());
      CHECK(again == c);
      CHECK(serialize_config(again) == serialize_config(c));
    }
  }

  TEST_CASE("state files are resolved at parse time") {
    const auto dir = scratch_dir("state-file");
    std::filesystem::create_directories(dir);
    const Json full = Json::parse(kTwoNode);
    std::ofstream(dir / "target.json") << full["target"].dump();
    Json j = full;
    j["target"] = Json{{"file", (dir / "target.json").string()}};
    const auto c = parse_config(j.dump());
    CHECK(c == parse_config(kTwoNode));
  }

  TEST_CASE("caps override") {
    Caps caps;
    apply_caps_override(caps, "max_dim=32768, max_blocks=8192");
    CHECK(caps.max_dim == 32768);
    CHECK(caps.max_blocks == 8192);
    CHECK_THROWS_AS(apply_caps_override(caps, "max_pixels=3"), ValidationError);
  }

  TEST_CASE("resolvability run writes one row per n") {
    const auto r = run(parse_config(kResolvability));
    CHECK(r.exit_code == kExitOk);
    CHECK(line_count(r.csv) == 8);
    CHECK(r.csv.rfind("n,R,trials,mean_gap,std_err,mutual_info_ref\n", 0) == 0);
    CHECK(r.record["rows"].size() == 7);
    CHECK(r.record["version"] == kVersion);
    CHECK(r.record["config"] == serialize_config(parse_config(kResolvability)));
  }

  TEST_CASE("region-nc on a Bell pair reports the certificate") {
    const auto r = run(parse_config(kBell));
    CHECK(r.exit_code == kExitInfeasibleEntangled);
    const auto& certs = r.record["diagnostics"]["nc_capacity"]["ppt"];
    REQUIRE(certs.size() == 3);
    CHECK(certs[0]["pass"] == false);
    CHECK(certs[0]["min_eigenvalue"].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(r.csv.find("INFEASIBLE_ENTANGLED") != std::string::npos);
  }

  TEST_CASE("reruns give byte-identical CSV") {
    Json sim = Json::parse(kTwoNode);
    sim["trials"] = 4;
    sim["extension"] = Json{{"joint", {{0.5, 0.0}, {0.0, 0.5}}},
                            {"factors", {{matrix2(1, 0, 0, 0)}, {matrix2(0, 0, 0, 1)}}}};
    for (const std::string text : {std::string(kResolvability), sim.dump()}) {
      auto c = parse_config(text);
      c.threads = 1;
      const auto a = run(c);
      c.threads = 4;
      const auto b = run(c);
      CHECK(a.csv == b.csv);
    }
  }

  TEST_CASE("other kinds run end to end") {
    Json info = Json::parse(kTwoNode);
    info["kind"] = "info";
    info["region"] = Json{{"restarts", 1}, {"max_u", 2}, {"iterations", 30}};
    const auto r = run(parse_config(info.dump()));
    CHECK(r.exit_code == kExitOk);
    CHECK(r.csv.find("I(X;U),1") != std::string::npos);

    Json oracle = Json::parse(kTwoNode);
    oracle["kind"] = "oracle";
    oracle["oracle"] = Json{{"max_u", 2}, {"grid_step", 0.25}};
    const auto o = run(parse_config(oracle.dump()));
    CHECK(o.exit_code == kExitOk);
    CHECK(o.record["rows"][0]["value"].get<double>() == doctest::Approx(1.0));

    oracle["oracle"]["budget"] = 3;
    CHECK(run(parse_config(oracle.dump())).exit_code == kExitBudget);

    Json region = Json::parse(kTwoNode);
    region["kind"] = "region-two-node";
    region["r0_grid"] = {0.0, 1.0};
    region["region"] = Json{{"restarts", 1}, {"max_u", 2}, {"iterations", 30}};
    const auto g = run(parse_config(region.dump()));
    CHECK(g.csv.rfind("R0,R1\n", 0) == 0);
    CHECK(line_count(g.csv) == 3);
  }

  TEST_CASE("exit codes follow the error codes") {
    CHECK(exit_code_for(ValidationError("R1", "nonnegative")) == kExitConfig);
    CHECK(exit_code_for(ParseError(2, "bad")) == kExitConfig);
    CHECK(exit_code_for(Error(ErrorCode::InfeasibleExtension, "x")) == kExitInfeasibleExtension);
    CHECK(exit_code_for(Error(ErrorCode::DimensionCap, "x")) == kExitDimensionCap);
    CHECK(exit_code_for(BudgetExceeded("x", 1.0)) == kExitBudget);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitOther);
  }

  TEST_CASE("outputs never overwrite earlier runs") {
    auto c = parse_config(kResolvability);
    c.out_dir = scratch_dir("outputs").string();
    const auto r = run(c);
    const auto first = write_outputs(r, c, "20260101T000000Z");
    const auto second = write_outputs(r, c, "20260101T000000Z");
    CHECK(first.csv != second.csv);
    CHECK(second.csv.find("resolvability-20260101T000000Z-1.csv") != std::string::npos);
    std::ifstream in(first.csv);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == r.csv);
    CHECK(utc_stamp().size() == 16);
  }
}
