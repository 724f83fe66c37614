#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "test_support.hpp"
#include "uavloc/csv.hpp"
#include "uavloc/scenario_config.hpp"

using namespace uavloc;
using nlohmann::json;

namespace {

std::string scenario_dir() {
  const char* dir = std::getenv("UAVLOC_SCENARIO_DIR");
  REQUIRE(dir != nullptr);
  return dir;
}

json minimal_config() {
  return json::parse(R"({
    "schema": 1,
    "sensors": {"s1": [0, 0, 0], "s2": [500, 100, 2000]},
    "target": [1000, 200, 100],
    "noise": {"sigma_r_m": 10.0, "sigma_az_deg": 1.0, "sigma_el_deg": 1.0},
    "estimator": {"iterations": 2},
    "runs": 100,
    "seed": 7
  })");
}

}  // namespace

TEST_CASE("shipped scenario files parse to the experiment settings") {
  const ScenarioConfig s1 = load_scenario_config(scenario_dir() + "/scenario1.json");
  CHECK(s1.sigma_r_m == 40.0);
  CHECK(s1.sweep.has_value());
  CHECK(s1.sweep->rho_values.size() == 6);
  CHECK(s1.sweep->sigma_angle_per_rho_rad == 0.1);
  CHECK_FALSE(s1.ml.has_value());

  const ScenarioConfig s2 = load_scenario_config(scenario_dir() + "/scenario2.json");
  CHECK(s2.sigma_r_m == 10.0);
  CHECK(s2.sigma_az_deg == 1.0);
  CHECK(s2.sweep->x_values.size() == 10);

  const ScenarioConfig s3 = load_scenario_config(scenario_dir() + "/scenario3.json");
  CHECK(s3.ml.has_value());
  CHECK(s3.ml->max_iterations == 50);
  CHECK(s3.runs == 10000);

  const Scenario sc = s2.to_scenario();
  CHECK(sc.noise.sigma_az_rad == Catch::Approx(kPi / 180.0).epsilon(1e-15));
  CHECK((sc.sensors.s2 - Eigen::Vector3d(500, 100, 2000)).norm() == 0.0);
}

TEST_CASE("missing fields are reported by name") {
  json cfg = minimal_config();
  cfg["noise"].erase("sigma_r_m");
  try {
    parse_scenario_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("noise.sigma_r_m") != std::string::npos);
  }

  cfg = minimal_config();
  cfg.erase("sensors");
  try {
    parse_scenario_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sensors") != std::string::npos);
  }
}

TEST_CASE("invalid values are rejected") {
  json cfg = minimal_config();
  cfg["runs"] = 0;
  CHECK_THROWS_AS(parse_scenario_config(cfg), ConfigError);

  cfg = minimal_config();
  cfg["noise"]["sigma_az_deg"] = -1.0;
  CHECK_THROWS_AS(parse_scenario_config(cfg), ConfigError);

  cfg = minimal_config();
  cfg["sensors"]["s2"] = cfg["sensors"]["s1"];
  CHECK_THROWS_AS(parse_scenario_config(cfg), ConfigError);

  cfg = minimal_config();
  cfg["schema"] = 2;
  CHECK_THROWS_AS(parse_scenario_config(cfg), ConfigError);

  cfg = minimal_config();
  cfg["target"] = {1.0, 2.0};
  CHECK_THROWS_AS(parse_scenario_config(cfg), ConfigError);

  CHECK_THROWS_AS(load_scenario_config("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("config echo re-parses to identical values") {
  const ScenarioConfig cfg = load_scenario_config(scenario_dir() + "/scenario1.json");
  const ScenarioConfig reparsed = parse_scenario_config(to_json(cfg));
  CHECK(reparsed.s1 == cfg.s1);
  CHECK(reparsed.s2 == cfg.s2);
  CHECK(reparsed.target == cfg.target);
  CHECK(reparsed.sigma_r_m == cfg.sigma_r_m);
  CHECK(reparsed.sigma_az_deg == cfg.sigma_az_deg);
  CHECK(reparsed.sigma_el_deg == cfg.sigma_el_deg);
  CHECK(reparsed.runs == cfg.runs);
  CHECK(reparsed.seed == cfg.seed);
  REQUIRE(reparsed.sweep.has_value());
  CHECK(reparsed.sweep->rho_values == cfg.sweep->rho_values);
  CHECK(reparsed.sweep->sigma_r_per_rho_m == cfg.sweep->sigma_r_per_rho_m);
}

TEST_CASE("csv doubles round-trip bit exactly") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "-0");
  uavloc::SplitMix64 rng(41);
  for (int i = 0; i < 2000; ++i) {
    double v = (rng.uniform01() - 0.5) * std::pow(10.0, uavloc::testing::uniform_in(rng, -12, 12));
    const std::string s = format_double(v);
    double parsed = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), parsed);
    REQUIRE(res.ec == std::errc());
    CHECK(parsed == v);
  }
}
