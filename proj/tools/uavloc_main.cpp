// Command-line front end: single-shot localization, CRLB queries, and the
// Monte Carlo experiments (ensemble simulation, noise/target sweeps, error
// CDF). Primary results go to stdout; summaries and warnings to stderr.
//
// Exit codes: 0 success, 2 configuration/parse error, 3 numerical/geometry
// error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/uavloc.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

nlohmann::json matrix_json(const Eigen::Matrix3d& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::Vector3d& v) {
  return {v(0), v(1), v(2)};
}

// Empty cell for failed runs/points, per-cell shortest round-trip otherwise.
std::string cell(const std::optional<double>& v) {
  return v ? uavloc::format_double(*v) : std::string();
}

std::string cell(double v) {
  return std::isnan(v) ? std::string() : uavloc::format_double(v);
}

struct LocateArgs {
  std::string config_path;
  double range_m = 0.0;
  double az = 0.0;
  double el = 0.0;
  bool radians = false;
};

int cmd_locate(const LocateArgs& args) {
  const uavloc::ScenarioConfig cfg = uavloc::load_scenario_config(args.config_path);
  const uavloc::Scenario sc = cfg.to_scenario();
  const double to_rad = args.radians ? 1.0 : uavloc::kPi / 180.0;
  uavloc::MeasurementVector m{args.range_m, args.az * to_rad, args.el * to_rad};

  const uavloc::PositionEstimate est =
      uavloc::locate(m, sc.sensors, sc.noise, sc.estimator_opts);

  nlohmann::json record;
  record["command"] = "locate";
  record["config"] = uavloc::to_json(cfg);
  record["measurement"] = {{"range_diff_m", args.range_m},
                           {"azimuth_rad", m.azimuth_rad},
                           {"elevation_rad", m.elevation_rad}};
  record["output"] = {{"estimate_m", vector_json(est.position)},
                      {"covariance_m2", matrix_json(est.covariance)},
                      {"iterations_used", est.iterations_used},
                      {"condition_number", est.condition_number}};
  record["version"] = uavloc::kVersion;
  std::cout << record.dump(2) << "\n";
  std::cerr << "locate finished at " << utc_timestamp() << "\n";
  return 0;
}

int cmd_crlb(const std::string& config_path) {
  const uavloc::ScenarioConfig cfg = uavloc::load_scenario_config(config_path);
  const uavloc::Scenario sc = cfg.to_scenario();
  const uavloc::CrlbResult res = uavloc::crlb(sc.target, sc.sensors, sc.noise);

  nlohmann::json record;
  record["command"] = "crlb";
  record["config"] = uavloc::to_json(cfg);
  record["output"] = {{"fim", matrix_json(res.fim)},
                      {"crlb_m2", matrix_json(res.crlb)},
                      {"rmse_bound_m", res.rmse_bound_m}};
  record["version"] = uavloc::kVersion;
  std::cout << record.dump(2) << "\n";
  std::cerr << "crlb finished at " << utc_timestamp() << "\n";
  return 0;
}

struct SimulateArgs {
  std::string config_path;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> estimators{"wls"};
  std::string summary_path;  // empty = stderr
};

int cmd_simulate(const SimulateArgs& args) {
  const uavloc::ScenarioConfig cfg = uavloc::load_scenario_config(args.config_path);
  uavloc::Scenario sc = cfg.to_scenario();
  if (args.runs) sc.runs = *args.runs;
  if (args.seed) sc.master_seed = *args.seed;

  bool want_ml = false;
  for (const auto& name : args.estimators) {
    if (name == "wls") continue;
    if (name == "ml") {
      want_ml = true;
    } else {
      throw uavloc::ConfigError("unknown estimator: " + name);
    }
  }
  if (want_ml && !sc.ml_opts) sc.ml_opts = uavloc::MlOptions{};
  if (!want_ml) sc.ml_opts.reset();

  std::vector<Eigen::Vector3d> wls_dev, ml_dev;
  const auto records = uavloc::simulate_runs(sc, &wls_dev, &ml_dev);

  std::cout << "run_index,error_wls_m" << (want_ml ? ",error_ml_m" : "") << "\n";
  for (const auto& rec : records) {
    std::cout << rec.run_index << "," << cell(rec.wls_error_m);
    if (want_ml) std::cout << "," << cell(rec.ml_error_m);
    std::cout << "\n";
  }

  std::vector<double> wls_err, ml_err;
  int wls_fail = 0, ml_fail = 0;
  for (const auto& rec : records) {
    if (rec.wls_error_m) wls_err.push_back(*rec.wls_error_m); else ++wls_fail;
    if (want_ml) {
      if (rec.ml_error_m) ml_err.push_back(*rec.ml_error_m); else ++ml_fail;
    }
  }
  const uavloc::EnsembleStats wls = uavloc::detail::summarize(wls_dev, wls_err, wls_fail);

  nlohmann::json summary;
  summary["command"] = "simulate";
  summary["runs"] = sc.runs;
  summary["seed"] = sc.master_seed;
  summary["rmse_wls_m"] = wls.rmse_m;
  summary["bias_wls_m"] = vector_json(wls.bias_m);
  summary["failure_count_wls"] = wls.failure_count;
  if (want_ml) {
    const uavloc::EnsembleStats ml = uavloc::detail::summarize(ml_dev, ml_err, ml_fail);
    summary["rmse_ml_m"] = ml.rmse_m;
    summary["bias_ml_m"] = vector_json(ml.bias_m);
    summary["failure_count_ml"] = ml.failure_count;
  }
  try {
    summary["crlb_rmse_bound_m"] =
        uavloc::crlb(sc.target, sc.sensors, sc.noise).rmse_bound_m;
  } catch (const std::runtime_error&) {
    summary["crlb_rmse_bound_m"] = nullptr;  // undefined for zero-noise configs
  }
  summary["version"] = uavloc::kVersion;
  summary["timestamp"] = utc_timestamp();
  if (args.summary_path.empty()) {
    std::cerr << summary.dump(2) << "\n";
  } else {
    std::ofstream out(args.summary_path);
    if (!out) throw uavloc::ConfigError("cannot open summary file: " + args.summary_path);
    out << summary.dump(2) << "\n";
  }
  return 0;
}

struct SweepArgs {
  std::string config_path;
  std::string mode;
  std::vector<double> values;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& args) {
  const uavloc::ScenarioConfig cfg = uavloc::load_scenario_config(args.config_path);
  uavloc::Scenario sc = cfg.to_scenario();
  if (args.runs) sc.runs = *args.runs;
  if (args.seed) sc.master_seed = *args.seed;

  const uavloc::ScenarioConfig::Sweep sweep_cfg =
      cfg.sweep.value_or(uavloc::ScenarioConfig::Sweep{});

  uavloc::SweepResult result;
  if (args.mode == "noise") {
    std::vector<double> rho = args.values;
    if (rho.empty()) rho = sweep_cfg.rho_values;
    if (rho.empty()) rho = {0.05, 0.1, 0.2, 0.4, 0.8, 1.0};
    result = uavloc::noise_sweep(sc, rho, sweep_cfg.sigma_r_per_rho_m,
                                 sweep_cfg.sigma_angle_per_rho_rad);
  } else if (args.mode == "target") {
    std::vector<double> xs = args.values;
    if (xs.empty()) xs = sweep_cfg.x_values;
    if (xs.empty()) {
      for (int i = 1; i <= 10; ++i) xs.push_back(200.0 * i);
    }
    result = uavloc::target_sweep(sc, xs);
  } else {
    throw uavloc::ConfigError("sweep mode must be 'noise' or 'target'");
  }

  std::cout << "axis_value,rmse_wls_m,crlb_bound_m"
            << (result.rmse_ml_m ? ",rmse_ml_m" : "") << "\n";
  for (std::size_t i = 0; i < result.axis_values.size(); ++i) {
    if (std::isnan(result.rmse_wls_m[i]) || std::isnan(result.crlb_bound_m[i])) {
      std::cerr << "warning: sweep point " << uavloc::format_double(result.axis_values[i])
                << " failed\n";
    }
    std::cout << uavloc::format_double(result.axis_values[i]) << ","
              << cell(result.rmse_wls_m[i]) << "," << cell(result.crlb_bound_m[i]);
    if (result.rmse_ml_m) std::cout << "," << cell((*result.rmse_ml_m)[i]);
    std::cout << "\n";
  }
  return 0;
}

struct CdfArgs {
  std::string config_path;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
};

int cmd_cdf(const CdfArgs& args) {
  const uavloc::ScenarioConfig cfg = uavloc::load_scenario_config(args.config_path);
  uavloc::Scenario sc = cfg.to_scenario();
  if (args.runs) sc.runs = *args.runs;
  if (args.seed) sc.master_seed = *args.seed;
  if (!sc.ml_opts) {
    throw uavloc::ConfigError("cdf requires the 'ml' options block in the config");
  }

  const uavloc::CdfCurves curves = uavloc::error_cdf(sc);

  // Step functions sampled on the merged grid of every observed error.
  std::vector<double> grid;
  grid.reserve(curves.wls_errors_m.size() + curves.ml_errors_m.size());
  grid.insert(grid.end(), curves.wls_errors_m.begin(), curves.wls_errors_m.end());
  grid.insert(grid.end(), curves.ml_errors_m.begin(), curves.ml_errors_m.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const double n_wls = static_cast<double>(curves.wls_errors_m.size());
  const double n_ml = static_cast<double>(curves.ml_errors_m.size());
  std::cout << "error_m,cdf_wls,cdf_ml\n";
  std::size_t i_wls = 0, i_ml = 0;
  for (double e : grid) {
    while (i_wls < curves.wls_errors_m.size() && curves.wls_errors_m[i_wls] <= e) ++i_wls;
    while (i_ml < curves.ml_errors_m.size() && curves.ml_errors_m[i_ml] <= e) ++i_ml;
    std::cout << uavloc::format_double(e) << ","
              << uavloc::format_double(static_cast<double>(i_wls) / n_wls) << ","
              << uavloc::format_double(static_cast<double>(i_ml) / n_ml) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid TDOA/AOA source localization toolkit"};
  app.require_subcommand(1);

  LocateArgs locate_args;
  CLI::App* locate = app.add_subcommand(
      "locate", "Estimate a source position from one measurement");
  locate->add_option("config", locate_args.config_path, "Scenario config (JSON)")
      ->required();
  locate->add_option("--range", locate_args.range_m, "Range difference, meters")
      ->required();
  locate->add_option("--az", locate_args.az, "Azimuth (degrees unless --radians)")
      ->required();
  locate->add_option("--el", locate_args.el, "Elevation (degrees unless --radians)")
      ->required();
  locate->add_flag("--radians", locate_args.radians,
                   "Interpret --az/--el as radians");

  std::string crlb_config;
  CLI::App* crlb_cmd = app.add_subcommand("crlb", "Print FIM, CRLB and RMSE bound");
  crlb_cmd->add_option("config", crlb_config, "Scenario config (JSON)")->required();

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo ensemble; per-run errors as CSV on stdout");
  simulate->add_option("config", sim_args.config_path, "Scenario config (JSON)")
      ->required();
  simulate->add_option("--runs", sim_args.runs, "Override ensemble size");
  simulate->add_option("--seed", sim_args.seed, "Override master seed");
  simulate->add_option("--estimators", sim_args.estimators,
                       "Estimators to run: wls[,ml]")
      ->delimiter(',');
  simulate->add_option("--summary", sim_args.summary_path,
                       "Write the summary JSON to this file instead of stderr");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "RMSE vs CRLB over a noise scaling or target x sweep (CSV)");
  sweep->add_option("config", sweep_args.config_path, "Scenario config (JSON)")
      ->required();
  sweep->add_option("--mode", sweep_args.mode, "noise | target")->required();
  sweep->add_option("--values", sweep_args.values,
                    "Sweep values (rho factors or x coordinates)")
      ->delimiter(',');
  sweep->add_option("--runs", sweep_args.runs, "Override ensemble size per point");
  sweep->add_option("--seed", sweep_args.seed, "Override master seed");

  CdfArgs cdf_args;
  CLI::App* cdf = app.add_subcommand(
      "cdf", "Paired WLS/ML empirical error CDF (CSV)");
  cdf->add_option("config", cdf_args.config_path, "Scenario config (JSON)")
      ->required();
  cdf->add_option("--runs", cdf_args.runs, "Override ensemble size");
  cdf->add_option("--seed", cdf_args.seed, "Override master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (locate->parsed()) return cmd_locate(locate_args);
    if (crlb_cmd->parsed()) return cmd_crlb(crlb_config);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (cdf->parsed()) return cmd_cdf(cdf_args);
  } catch (const uavloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const uavloc::LocalizationError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
