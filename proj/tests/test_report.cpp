#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "dimlab/errors.hpp"
#include "dimlab/report.hpp"

using namespace dimlab;

TEST_CASE("config defaults and roundtrip") {
  const auto c = ExperimentConfig::parse("{}");
  CHECK(c.set.generator == "cantor");
  CHECK(c.checks.size() == 4);
  CHECK(c.slacks.banaji == 0.07);
  CHECK(c.stochastic.seed == 1);

  auto custom = ExperimentConfig::parse(R"({
    "set": {"generator": "fp", "p": 2, "n": 500},
    "estimator": {"thetas": [1, 0.4], "k_min": 3, "k_max": 9},
    "stochastic": {"seed": 99},
    "checks": ["banaji", {"name": "profile_ratio", "s": 1, "t": 0.5}],
    "slacks": {"profile_ratio": 0.2}
  })");
  CHECK(custom.set.p == 2.0);
  CHECK(custom.estimator.thetas.size() == 2);
  CHECK(custom.stochastic.seed == 99);
  CHECK(custom.checks[1].overrides["t"] == 0.5);
  CHECK(custom.slacks.profile_ratio == 0.2);
  const auto back = ExperimentConfig::from_json(custom.to_json());
  CHECK(back.to_json() == custom.to_json());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"sett\": {}}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"set\": {\"pp\": 1}}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"checks\": [\"nope\"]}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"slacks\": {\"x\": 1}}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"set\": {\"p\": \"one\"}}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/dimlab.json"), ConfigError);
  SetSpec bad;
  bad.generator = "torus";
  CHECK_THROWS_AS(build_set(bad), ConfigError);
}

TEST_CASE("slack names map to fields") {
  Slacks s;
  for (const auto& name : slack_names()) CHECK(slack_field(s, name) != nullptr);
  *slack_field(s, "fbm") = 0.5;
  CHECK(s.fbm == 0.5);
  CHECK(slack_field(s, "nope") == nullptr);
}

TEST_CASE("sets from specs") {
  SetSpec point;
  point.generator = "point";
  CHECK(build_set(point).size() == 1);
  SetSpec prod;
  prod.generator = "product";
  SetSpec c;
  c.depth = 3;
  prod.factors = {c, c};
  const auto e = build_set(prod);
  CHECK(e.size() == 64);
  CHECK(e.dim() == 2);
}

TEST_CASE("small experiment is reproducible") {
  auto config = ExperimentConfig::parse(R"({
    "set": {"generator": "cantor", "depth": 8},
    "estimator": {"thetas": [1, 0.6], "ts": [0.5], "k_min": 3, "k_max": 9},
    "checks": ["banaji", "box_collapse"]
  })");
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  CHECK(a.digest == b.digest);
  CHECK(a.body.dump() == b.body.dump());
  CHECK(a.verdicts.size() >= 2);
  CHECK(a.all_pass());

  config.slacks.banaji = -1.0;
  const auto c = run_experiment(config);
  CHECK_FALSE(c.all_pass());
  CHECK(c.digest != a.digest);

  const auto dir = std::filesystem::temp_directory_path() / "dimlab_test_report";
  write_report(a, dir);
  std::ifstream in(dir / "report.json");
  const auto j = Json::parse(in);
  CHECK(j.contains("digest"));
  CHECK(std::filesystem::exists(dir / "samples.csv"));
  std::filesystem::remove_all(dir);
}
