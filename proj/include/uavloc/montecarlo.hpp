#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavloc/crlb.hpp"
#include "uavloc/errors.hpp"
#include "uavloc/measurement_model.hpp"
#include "uavloc/ml_estimator.hpp"
#include "uavloc/rng.hpp"
#include "uavloc/wls_estimator.hpp"

namespace uavloc {

// One full experiment description. When ml_opts is present the ML estimator
// runs on the same measurement draw as the WLS estimator, initialized at the
// true target (the evaluation protocol for the reference estimator).
struct Scenario {
  SensorPair sensors;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  NoiseModel noise;
  EstimatorOptions estimator_opts;
  std::optional<MlOptions> ml_opts;
  int runs = 10000;
  std::uint64_t master_seed = 0;
};

struct EnsembleStats {
  double rmse_m = 0.0;                             // over successful runs
  Eigen::Vector3d bias_m = Eigen::Vector3d::Zero();  // mean(estimate - truth)
  int failure_count = 0;
  std::vector<double> errors_m;                    // per successful run, run order
};

struct EnsembleResult {
  EnsembleStats wls;
  std::optional<EnsembleStats> ml;
};

// Raw per-run outcome; empty optional means the estimator raised.
struct RunRecord {
  int run_index = 0;  // 1-based
  std::optional<double> wls_error_m;
  std::optional<double> ml_error_m;
};

struct SweepResult {
  std::vector<double> axis_values;
  std::vector<double> rmse_wls_m;   // NaN where the point failed
  std::vector<double> crlb_bound_m;
  std::optional<std::vector<double>> rmse_ml_m;
};

// Sorted per-run error norms for paired WLS/ML comparison; empirical CDF level
// of entry i (0-based) is (i+1)/size.
struct CdfCurves {
  std::vector<double> wls_errors_m;
  std::vector<double> ml_errors_m;
};

inline void validate_scenario(const Scenario& sc) {
  try {
    validate_sensors(sc.sensors);
  } catch (const DegenerateGeometry& e) {
    throw ConfigError(e.what());
  }
  if (!sc.target.allFinite()) throw ConfigError("target must be finite");
  if (sc.runs < 1) throw ConfigError("runs must be >= 1");
  if (sc.noise.sigma_r_m < 0.0 || sc.noise.sigma_az_rad < 0.0 ||
      sc.noise.sigma_el_rad < 0.0) {
    throw ConfigError("noise sigmas must be nonnegative");
  }
  if (sc.estimator_opts.refinement_iterations < 1) {
    throw ConfigError("estimator.iterations must be >= 1");
  }
  if (sc.ml_opts) {
    if (sc.ml_opts->max_iterations < 1) throw ConfigError("ml.max_iterations must be >= 1");
    if (sc.ml_opts->step_tolerance_m <= 0.0) throw ConfigError("ml.step_tolerance_m must be > 0");
  }
}

namespace detail {

// Mean and deviation accumulation for one estimator across records.
inline EnsembleStats summarize(const std::vector<Eigen::Vector3d>& deviations,
                               const std::vector<double>& errors, int failures) {
  EnsembleStats st;
  st.failure_count = failures;
  st.errors_m = errors;
  if (errors.empty()) {
    st.rmse_m = std::numeric_limits<double>::quiet_NaN();
    st.bias_m.setConstant(std::numeric_limits<double>::quiet_NaN());
    return st;
  }
  double sq_sum = 0.0;
  for (double e : errors) sq_sum += e * e;
  st.rmse_m = std::sqrt(sq_sum / static_cast<double>(errors.size()));
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& d : deviations) mean += d;
  st.bias_m = mean / static_cast<double>(deviations.size());
  return st;
}

}  // namespace detail

// Execute every run of a scenario: run l draws its measurement from the
// substream seeded by (master_seed, l), then both estimators consume that same
// draw. Estimator failures are recorded, never propagated.
inline std::vector<RunRecord> simulate_runs(const Scenario& sc,
                                            std::vector<Eigen::Vector3d>* wls_dev = nullptr,
                                            std::vector<Eigen::Vector3d>* ml_dev = nullptr) {
  validate_scenario(sc);
  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(sc.runs));
  for (int l = 1; l <= sc.runs; ++l) {
    RunRecord rec;
    rec.run_index = l;
    SplitMix64 rng(substream_seed(sc.master_seed, static_cast<std::uint64_t>(l)));
    try {
      const MeasurementVector m =
          sample_measurement(sc.target, sc.sensors, sc.noise, rng);
      try {
        const PositionEstimate est = locate(m, sc.sensors, sc.noise, sc.estimator_opts);
        rec.wls_error_m = (est.position - sc.target).norm();
        if (wls_dev) wls_dev->push_back(est.position - sc.target);
      } catch (const LocalizationError&) {
      }
      if (sc.ml_opts) {
        try {
          MlOptions opts = *sc.ml_opts;
          opts.initial_guess = sc.target;
          const PositionEstimate est = ml_locate(m, sc.sensors, sc.noise, opts);
          rec.ml_error_m = (est.position - sc.target).norm();
          if (ml_dev) ml_dev->push_back(est.position - sc.target);
        } catch (const LocalizationError&) {
        }
      }
    } catch (const LocalizationError&) {
      // sampling itself failed: both estimators count the run as failed
    }
    records.push_back(rec);
  }
  return records;
}

inline EnsembleResult run_ensemble(const Scenario& sc) {
  std::vector<Eigen::Vector3d> wls_dev, ml_dev;
  const std::vector<RunRecord> records = simulate_runs(sc, &wls_dev, &ml_dev);

  std::vector<double> wls_err, ml_err;
  int wls_fail = 0, ml_fail = 0;
  for (const auto& rec : records) {
    if (rec.wls_error_m) wls_err.push_back(*rec.wls_error_m); else ++wls_fail;
    if (sc.ml_opts) {
      if (rec.ml_error_m) ml_err.push_back(*rec.ml_error_m); else ++ml_fail;
    }
  }
  EnsembleResult result;
  result.wls = detail::summarize(wls_dev, wls_err, wls_fail);
  if (sc.ml_opts) result.ml = detail::summarize(ml_dev, ml_err, ml_fail);
  return result;
}

namespace detail {

inline void append_sweep_point(SweepResult& out, const Scenario& sc) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const EnsembleResult res = run_ensemble(sc);
    out.rmse_wls_m.push_back(res.wls.rmse_m);
    if (out.rmse_ml_m) out.rmse_ml_m->push_back(res.ml ? res.ml->rmse_m : nan);
  } catch (const LocalizationError&) {
    out.rmse_wls_m.push_back(nan);
    if (out.rmse_ml_m) out.rmse_ml_m->push_back(nan);
  }
  try {
    out.crlb_bound_m.push_back(crlb(sc.target, sc.sensors, sc.noise).rmse_bound_m);
  } catch (const std::runtime_error&) {
    out.crlb_bound_m.push_back(nan);
  }
}

}  // namespace detail

// Noise-scaling experiment: sigma_r = sigma_r_per_rho * rho and
// sigma_az = sigma_el = sigma_angle_per_rho * rho for each scaling factor.
// Every point reuses the base master_seed so run-to-run draws are paired
// across noise levels.
inline SweepResult noise_sweep(const Scenario& base, const std::vector<double>& rho_values,
                               double sigma_r_per_rho_m = 40.0,
                               double sigma_angle_per_rho_rad = 0.1) {
  if (rho_values.empty()) throw ConfigError("rho_values must be non-empty");
  for (std::size_t i = 0; i < rho_values.size(); ++i) {
    if (!(rho_values[i] > 0.0)) throw ConfigError("rho_values must be positive");
    if (i > 0 && rho_values[i] <= rho_values[i - 1]) {
      throw ConfigError("rho_values must be strictly ascending");
    }
  }
  SweepResult out;
  if (base.ml_opts) out.rmse_ml_m.emplace();
  for (double rho : rho_values) {
    Scenario sc = base;
    sc.noise = {sigma_r_per_rho_m * rho, sigma_angle_per_rho_rad * rho,
                sigma_angle_per_rho_rad * rho};
    out.axis_values.push_back(rho);
    detail::append_sweep_point(out, sc);
  }
  return out;
}

// Target-position experiment: the target x coordinate takes each sweep value,
// y and z stay at the base scenario's target.
inline SweepResult target_sweep(const Scenario& base, const std::vector<double>& x_values) {
  if (x_values.empty()) throw ConfigError("x_values must be non-empty");
  for (double x : x_values) {
    if (!std::isfinite(x)) throw ConfigError("x_values must be finite");
  }
  SweepResult out;
  if (base.ml_opts) out.rmse_ml_m.emplace();
  for (double x : x_values) {
    Scenario sc = base;
    sc.target = Eigen::Vector3d(x, base.target.y(), base.target.z());
    out.axis_values.push_back(x);
    detail::append_sweep_point(out, sc);
  }
  return out;
}

// Paired empirical error distributions from identical measurement draws.
// Runs where either estimator failed are dropped from both curves.
inline CdfCurves error_cdf(const Scenario& sc) {
  if (!sc.ml_opts) throw ConfigError("error_cdf requires the ml options block");
  const std::vector<RunRecord> records = simulate_runs(sc);
  CdfCurves curves;
  for (const auto& rec : records) {
    if (rec.wls_error_m && rec.ml_error_m) {
      curves.wls_errors_m.push_back(*rec.wls_error_m);
      curves.ml_errors_m.push_back(*rec.ml_error_m);
    }
  }
  std::sort(curves.wls_errors_m.begin(), curves.wls_errors_m.end());
  std::sort(curves.ml_errors_m.begin(), curves.ml_errors_m.end());
  return curves;
}

}  // namespace uavloc
