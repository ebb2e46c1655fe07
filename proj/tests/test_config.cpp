// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "inclusion_lab/config.hpp"
#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/scenario.hpp"

using namespace inclusion_lab;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(R"({"scenario": "simulate"})");
  CHECK(c.scenario == "simulate");
  CHECK(c.triple.dim == 8);
  CHECK(c.triple.lambda.empty());
  CHECK(c.triple.p == 2.0);
  CHECK(c.op.kind == "heat");
  CHECK(c.grid.steps_per_unit == 512);
  CHECK(c.tolerances.dpp == 1e-3);
  const SpectralTriple t = c.triple.build();
  CHECK(t.lambda(2) == 9.0);
}

TEST_CASE("schema violations name the field") {
  CHECK(field_of(R"({"triple": {"lambda": [1.0, 0.0, 9.0]}})") == "triple.lambda[1]");
  CHECK(field_of(R"({"triple": {"lambda": [4.0, 1.0]}})") == "triple.lambda[1]");
  CHECK(field_of(R"({"triple": {"p": 2.0, "q": 3.0}})") == "triple.q");
  CHECK(field_of(R"({"triple": {"dim": 2}, "bogus": 1})") == "bogus");
  CHECK(field_of(R"({"operator": {"kind": "wave"}})") == "operator.kind");
  CHECK(field_of(R"({"seed": -3})") == "seed");
  CHECK(field_of(R"({"start": {"t0": 2.0}})") == "start.t0");
  CHECK(field_of("{not json") == "<root>");
  CHECK(field_of(R"({"triple": {"dim": 2}, "start": {"x0": [1.0]}})").rfind("start.x0", 0) == 0);
}

TEST_CASE("q alone determines p") {
  const RunConfig c = parse_config(R"({"triple": {"q": 1.5}})");
  CHECK(c.triple.p == doctest::Approx(3.0));
  CHECK(parse_config(R"({"triple": {"p": 3.0, "q": 1.5}})").triple.p == 3.0);
}

TEST_CASE("dump and parse round-trip for every preset") {
  for (const std::string& name : preset_names()) {
    const RunConfig a = preset_config(name);
    const std::string text = dump_config(a);
    CHECK(dump_config(parse_config(text)) == text);
  }
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("history knots build a piecewise-linear path") {
  const RunConfig c = parse_config(R"({
    "triple": {"dim": 1, "lambda": [1.0], "horizon": 1.0},
    "grid": {"steps_per_unit": 8},
    "start": {"t0": 0.5, "history": [{"t": 0.0, "x": [2.0]}, {"t": 0.5, "x": [1.0]}]}
  })");
  const TimeGrid g = build_grid(c);
  const auto [h, start] = build_history(c, g);
  CHECK(start == 4);
  CHECK(h.state(0)(0) == 2.0);
  CHECK(h.state(2)(0) == doctest::Approx(1.5));
  CHECK(h.state(4)(0) == 1.0);
}

TEST_CASE("unknown scenario is a config error") {
  RunConfig c = preset_config("heat");
  c.scenario = "teleport";
  c.out = (std::filesystem::temp_directory_path() / "il_test_unknown").string();
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("scenario report exists and reruns are byte-identical") {
  const auto base = std::filesystem::temp_directory_path() / "il_test_config_rerun";
  std::filesystem::remove_all(base);
  RunConfig c = preset_config("heat");
  c.scenario = "simulate";
  c.seed = 5;
  c.samples.trajectories = 3;
  c.out = (base / "a").string();
  const ScenarioResult a = run(c);
  c.out = (base / "b").string();
  const ScenarioResult b = run(c);
  CHECK(a.pass);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (const auto& path : a.artifacts) CHECK(std::filesystem::exists(path));
  CHECK(std::filesystem::path(a.artifacts.back()).filename() == "report.json");
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(slurp(a.artifacts[i]) == slurp(b.artifacts[i]));
  CHECK(slurp(a.report_path).find("wall") == std::string::npos);
  std::filesystem::remove_all(base);
}
