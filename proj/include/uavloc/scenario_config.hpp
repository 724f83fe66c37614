#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/errors.hpp"
#include "uavloc/montecarlo.hpp"

namespace uavloc {

// File-level experiment description. Angles are degrees and distances meters
// in the file; values are kept exactly as parsed so a config written back out
// re-parses to identical numbers. to_scenario() converts to radians.
struct ScenarioConfig {
  int schema = 1;
  std::array<double, 3> s1{};
  std::array<double, 3> s2{};
  std::array<double, 3> target{};
  double sigma_r_m = 0.0;
  double sigma_az_deg = 0.0;
  double sigma_el_deg = 0.0;
  int estimator_iterations = 2;

  struct Ml {
    int max_iterations = 50;
    double step_tolerance_m = 1e-8;
  };
  std::optional<Ml> ml;

  // Sweep settings; the angular coefficient is radians per rho by design
  // (the noise-scaling experiment is specified in radians).
  struct Sweep {
    std::vector<double> rho_values;
    std::vector<double> x_values;
    double sigma_r_per_rho_m = 40.0;
    double sigma_angle_per_rho_rad = 0.1;
  };
  std::optional<Sweep> sweep;

  int runs = 10000;
  std::uint64_t seed = 0;

  Scenario to_scenario() const {
    constexpr double deg = kPi / 180.0;
    Scenario sc;
    sc.sensors.s1 = Eigen::Vector3d(s1[0], s1[1], s1[2]);
    sc.sensors.s2 = Eigen::Vector3d(s2[0], s2[1], s2[2]);
    sc.target = Eigen::Vector3d(target[0], target[1], target[2]);
    sc.noise = {sigma_r_m, sigma_az_deg * deg, sigma_el_deg * deg};
    sc.estimator_opts.refinement_iterations = estimator_iterations;
    if (ml) {
      MlOptions opts;
      opts.max_iterations = ml->max_iterations;
      opts.step_tolerance_m = ml->step_tolerance_m;
      sc.ml_opts = opts;
    }
    sc.runs = runs;
    sc.master_seed = seed;
    return sc;
  }
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj,
                                           const std::string& path) {
  const nlohmann::json* cur = &obj;
  std::string walked;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos
                                                   ? std::string::npos
                                                   : dot - start);
    walked = walked.empty() ? key : walked + "." + key;
    if (!cur->is_object() || !cur->contains(key)) {
      throw ConfigError("missing required config field: " + walked);
    }
    cur = &(*cur)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return *cur;
}

inline double number_field(const nlohmann::json& obj, const std::string& path) {
  const nlohmann::json& v = require_field(obj, path);
  if (!v.is_number()) throw ConfigError("config field is not a number: " + path);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config field is not finite: " + path);
  return x;
}

inline std::array<double, 3> vec3_field(const nlohmann::json& obj,
                                        const std::string& path) {
  const nlohmann::json& v = require_field(obj, path);
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("config field must be a 3-element array: " + path);
  }
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError("config field is not numeric: " + path);
    out[static_cast<std::size_t>(i)] = v[i].get<double>();
    if (!std::isfinite(out[static_cast<std::size_t>(i)])) {
      throw ConfigError("config field is not finite: " + path);
    }
  }
  return out;
}

inline int int_field(const nlohmann::json& obj, const std::string& path) {
  const nlohmann::json& v = require_field(obj, path);
  if (!v.is_number_integer()) throw ConfigError("config field must be an integer: " + path);
  return v.get<int>();
}

}  // namespace detail

inline ScenarioConfig parse_scenario_config(const nlohmann::json& j) {
  ScenarioConfig cfg;
  cfg.schema = detail::int_field(j, "schema");
  if (cfg.schema != 1) throw ConfigError("unsupported config schema version");
  cfg.s1 = detail::vec3_field(j, "sensors.s1");
  cfg.s2 = detail::vec3_field(j, "sensors.s2");
  cfg.target = detail::vec3_field(j, "target");
  cfg.sigma_r_m = detail::number_field(j, "noise.sigma_r_m");
  cfg.sigma_az_deg = detail::number_field(j, "noise.sigma_az_deg");
  cfg.sigma_el_deg = detail::number_field(j, "noise.sigma_el_deg");
  cfg.estimator_iterations = detail::int_field(j, "estimator.iterations");
  cfg.runs = detail::int_field(j, "runs");
  const nlohmann::json& seed = detail::require_field(j, "seed");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    throw ConfigError("config field must be a nonnegative integer: seed");
  }
  cfg.seed = seed.get<std::uint64_t>();

  if (j.contains("ml")) {
    ScenarioConfig::Ml ml;
    ml.max_iterations = detail::int_field(j, "ml.max_iterations");
    ml.step_tolerance_m = detail::number_field(j, "ml.step_tolerance_m");
    cfg.ml = ml;
  }
  if (j.contains("sweep")) {
    ScenarioConfig::Sweep sweep;
    const nlohmann::json& s = j["sweep"];
    try {
      if (s.contains("rho_values")) sweep.rho_values = s["rho_values"].get<std::vector<double>>();
      if (s.contains("x_values")) sweep.x_values = s["x_values"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("sweep value lists must be numeric arrays");
    }
    if (s.contains("sigma_r_per_rho_m")) sweep.sigma_r_per_rho_m = detail::number_field(s, "sigma_r_per_rho_m");
    if (s.contains("sigma_angle_per_rho_rad")) sweep.sigma_angle_per_rho_rad = detail::number_field(s, "sigma_angle_per_rho_rad");
    cfg.sweep = sweep;
  }

  // Value checks beyond shape.
  if (cfg.sigma_r_m < 0 || cfg.sigma_az_deg < 0 || cfg.sigma_el_deg < 0) {
    throw ConfigError("noise sigmas must be nonnegative");
  }
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  if (cfg.estimator_iterations < 1) throw ConfigError("estimator.iterations must be >= 1");
  if (cfg.ml && cfg.ml->max_iterations < 1) throw ConfigError("ml.max_iterations must be >= 1");
  if (cfg.ml && cfg.ml->step_tolerance_m <= 0) throw ConfigError("ml.step_tolerance_m must be > 0");
  try {
    validate_sensors({Eigen::Vector3d(cfg.s1[0], cfg.s1[1], cfg.s1[2]),
                      Eigen::Vector3d(cfg.s2[0], cfg.s2[1], cfg.s2[2])});
  } catch (const DegenerateGeometry& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario_config(j);
}

// Echo of the resolved configuration, same schema and units as the file.
inline nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["schema"] = cfg.schema;
  j["sensors"]["s1"] = cfg.s1;
  j["sensors"]["s2"] = cfg.s2;
  j["target"] = cfg.target;
  j["noise"]["sigma_r_m"] = cfg.sigma_r_m;
  j["noise"]["sigma_az_deg"] = cfg.sigma_az_deg;
  j["noise"]["sigma_el_deg"] = cfg.sigma_el_deg;
  j["estimator"]["iterations"] = cfg.estimator_iterations;
  if (cfg.ml) {
    j["ml"]["max_iterations"] = cfg.ml->max_iterations;
    j["ml"]["step_tolerance_m"] = cfg.ml->step_tolerance_m;
  }
  if (cfg.sweep) {
    if (!cfg.sweep->rho_values.empty()) j["sweep"]["rho_values"] = cfg.sweep->rho_values;
    if (!cfg.sweep->x_values.empty()) j["sweep"]["x_values"] = cfg.sweep->x_values;
    j["sweep"]["sigma_r_per_rho_m"] = cfg.sweep->sigma_r_per_rho_m;
    j["sweep"]["sigma_angle_per_rho_rad"] = cfg.sweep->sigma_angle_per_rho_rad;
  }
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace uavloc
