// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one pass/fail line per criterion.
//
// Usage: acceptance <path-to-uavloc-cli> <path-to-scenarios-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "test_support.hpp"
#include "uavloc/uavloc.hpp"

using namespace uavloc;
using namespace uavloc::testing;

namespace {

int g_failures = 0;

class Criterion {
public:
  explicit Criterion(int index, std::string title)
      : index_(index), title_(std::move(title)),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok && first_failure_.empty()) first_failure_ = detail;
    ok_ = ok_ && ok;
  }

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  ~Criterion() {
    const double dt = elapsed_s();
    if (ok_) {
      std::printf("[PASS] criterion %2d: %s (%.2f s)\n", index_, title_.c_str(), dt);
    } else {
      std::printf("[FAIL] criterion %2d: %s (%.2f s) -- %s\n", index_, title_.c_str(),
                  dt, first_failure_.c_str());
      ++g_failures;
    }
  }

private:
  int index_;
  std::string title_;
  bool ok_ = true;
  std::string first_failure_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Scenario section5_scenario() {
  Scenario sc;
  sc.sensors = experiment_sensors();
  sc.target = experiment_target();
  sc.noise = {10.0, kPi / 180.0, kPi / 180.0};
  sc.master_seed = 20250810;
  return sc;
}

void criterion_exact_recovery() {
  Criterion c(1, "exact recovery on noise-free measurements");
  const SensorPair sensors = experiment_sensors();
  const NoiseModel noise{10.0, kPi / 180.0, kPi / 180.0};
  SplitMix64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d u = random_target(rng, sensors);
    const MeasurementVector m = true_measurement(u, sensors);
    const PositionEstimate est = locate(m, sensors, noise);
    worst = std::max(worst, (est.position - u).norm());
  }
  c.expect(worst < 1e-6, "worst error " + fmt(worst) + " m >= 1e-6 m");
  c.expect(c.elapsed_s() < 5.0, "runtime exceeded 5 s");
}

void criterion_b_matrix_oracle() {
  Criterion c(2, "finite-difference oracle adjudicates the B matrix");
  const SensorPair sensors = experiment_sensors();
  SplitMix64 rng(102);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d u = random_target(rng, sensors);
    const MeasurementVector m = true_measurement(u, sensors);
    const Eigen::Matrix3d jac = fd_epsilon_jacobian(m, sensors, u);
    const LinearizedNoiseMap b = b_matrix(m, sensors, u);
    const Eigen::Vector3d diag(b.b_r, b.b_az, b.b_el);
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) {
        if (r == col) continue;
        const double scale = std::min(std::abs(jac(r, r)), std::abs(jac(col, col)));
        c.expect(std::abs(jac(r, col)) < 1e-6 * scale,
                 "off-diagonal (" + std::to_string(r) + "," + std::to_string(col) +
                     ") = " + fmt(jac(r, col)) + " vs diagonal scale " + fmt(scale));
      }
      const double rel = std::abs(std::abs(jac(r, r)) - diag(r)) / diag(r);
      c.expect(rel < 1e-4, "diagonal " + std::to_string(r) + " relative mismatch " +
                               fmt(rel));
    }
  }
}

void criterion_crlb_attainment() {
  Criterion c(3, "estimator covariance attains the CRLB at true values");
  const SensorPair sensors = experiment_sensors();
  const NoiseModel noise{10.0, kPi / 180.0, kPi / 180.0};
  const Eigen::Matrix3d q_inv = detail::inverse_variances(noise).asDiagonal();
  SplitMix64 rng(103);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d u = random_target(rng, sensors);
    const MeasurementVector m = true_measurement(u, sensors);
    const PseudoLinearSystem sys = build_system(m, sensors);
    const LinearizedNoiseMap b = b_matrix(m, sensors, u);
    const Eigen::Matrix3d l = b.as_matrix().inverse() * sys.G;
    const Eigen::Matrix3d lhs = l.transpose() * q_inv * l;
    const Eigen::Matrix3d fim = crlb(u, sensors, noise).fim;
    const double rel = (lhs - fim).norm() / fim.norm();
    c.expect(rel < 1e-9, "relative Frobenius mismatch " + fmt(rel));
  }
}

void criterion_jacobian() {
  Criterion c(4, "analytic measurement jacobian matches central differences");
  const SensorPair sensors = experiment_sensors();
  SplitMix64 rng(104);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d u = random_target(rng, sensors);
    const Eigen::Matrix3d analytic = measurement_jacobian(u, sensors);
    const Eigen::Matrix3d fd = fd_measurement_jacobian(u, sensors);
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) {
        const double tol = std::max(1e-6 * std::abs(fd(r, col)), 1e-10);
        c.expect(std::abs(analytic(r, col) - fd(r, col)) < tol,
                 "entry (" + std::to_string(r) + "," + std::to_string(col) +
                     ") analytic " + fmt(analytic(r, col)) + " vs fd " +
                     fmt(fd(r, col)));
      }
    }
  }
}

void criterion_scenario1() {
  Criterion c(5, "noise-scaling experiment stays on the bound");
  Scenario sc = section5_scenario();
  sc.runs = 2000;
  const std::vector<double> rho{0.05, 0.1, 0.2};
  const SweepResult sweep = noise_sweep(sc, rho);
  const double per_rho = sweep.crlb_bound_m[0] / rho[0];
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double ratio = sweep.rmse_wls_m[i] / sweep.crlb_bound_m[i];
    c.expect(ratio > 0.93 && ratio < 1.12,
             "rmse/crlb ratio " + fmt(ratio) + " at rho " + fmt(rho[i]));
    const double lin = std::abs(sweep.crlb_bound_m[i] - per_rho * rho[i]) /
                       sweep.crlb_bound_m[i];
    c.expect(lin < 1e-9, "bound deviates from linearity by " + fmt(lin));
  }
  c.expect(c.elapsed_s() < 30.0, "runtime exceeded 30 s");
}

void criterion_scenario2() {
  Criterion c(6, "target sweep matches the bound at every position");
  Scenario sc = section5_scenario();
  sc.runs = 2000;
  const SweepResult sweep = target_sweep(sc, {400, 800, 1200, 1600, 2000});
  for (std::size_t i = 0; i < sweep.axis_values.size(); ++i) {
    const double ratio = sweep.rmse_wls_m[i] / sweep.crlb_bound_m[i];
    c.expect(ratio > 0.93 && ratio < 1.12,
             "rmse/crlb ratio " + fmt(ratio) + " at x " + fmt(sweep.axis_values[i]));
  }
  c.expect(c.elapsed_s() < 60.0, "runtime exceeded 60 s");
}

void criterion_scenario3() {
  Criterion c(7, "paired error distributions of WLS and ML coincide");
  Scenario sc = section5_scenario();
  sc.runs = 2000;
  sc.ml_opts = MlOptions{};
  const CdfCurves curves = error_cdf(sc);
  const std::size_t n = curves.wls_errors_m.size();
  c.expect(n == 2000, "paired runs lost: " + std::to_string(n));

  const double med_wls =
      0.5 * (curves.wls_errors_m[n / 2 - 1] + curves.wls_errors_m[n / 2]);
  const double med_ml =
      0.5 * (curves.ml_errors_m[n / 2 - 1] + curves.ml_errors_m[n / 2]);
  c.expect(std::abs(med_wls - med_ml) < 0.05 * med_ml,
           "medians " + fmt(med_wls) + " vs " + fmt(med_ml));

  // Two-sample Kolmogorov-Smirnov statistic over the merged grid.
  double ks = 0.0;
  std::size_t iw = 0, im = 0;
  while (iw < n || im < n) {
    const double next_w = iw < n ? curves.wls_errors_m[iw] : 1e300;
    const double next_m = im < n ? curves.ml_errors_m[im] : 1e300;
    const double x = std::min(next_w, next_m);
    while (iw < n && curves.wls_errors_m[iw] <= x) ++iw;
    while (im < n && curves.ml_errors_m[im] <= x) ++im;
    ks = std::max(ks, std::abs(static_cast<double>(iw) - static_cast<double>(im)) /
                          static_cast<double>(n));
  }
  c.expect(ks < 0.05, "KS statistic " + fmt(ks));
  c.expect(c.elapsed_s() < 60.0, "runtime exceeded 60 s");
}

void criterion_unbiasedness() {
  Criterion c(8, "ensemble mean is unbiased at the experiment settings");
  Scenario sc = section5_scenario();
  sc.runs = 10000;
  const EnsembleResult res = run_ensemble(sc);
  c.expect(res.wls.failure_count == 0,
           std::to_string(res.wls.failure_count) + " failed runs");
  const double bias = res.wls.bias_m.norm();
  c.expect(bias < 0.05 * res.wls.rmse_m,
           "bias " + fmt(bias) + " m vs rmse " + fmt(res.wls.rmse_m) + " m");
}

void criterion_determinism(const std::string& cli, const std::string& scenarios) {
  Criterion c(9, "simulate output is byte-identical across reruns");
  const auto tmp = std::filesystem::temp_directory_path();
  const std::string out_a = (tmp / "uavloc_acc_a.csv").string();
  const std::string out_b = (tmp / "uavloc_acc_b.csv").string();
  const std::string cmd_tail = " simulate " + scenarios + "/scenario3.json" +
                               " --runs 500 --estimators wls,ml 2>/dev/null >";
  c.expect(run_command(cli + cmd_tail + out_a) == 0, "first simulate run failed");
  c.expect(run_command(cli + cmd_tail + out_b) == 0, "second simulate run failed");
  const std::string a = read_file(out_a);
  c.expect(!a.empty() && a == read_file(out_b), "CSV bytes differ between reruns");
}

void criterion_failure_accounting(const std::string& cli, const std::string& scenarios) {
  Criterion c(10, "experiment configs run failure-free; guards map to exit 3");
  for (const std::string name : {"scenario1.json", "scenario2.json", "scenario3.json"}) {
    const ScenarioConfig cfg = load_scenario_config(scenarios + "/" + name);
    const EnsembleResult res = run_ensemble(cfg.to_scenario());
    c.expect(res.wls.failure_count == 0,
             name + ": " + std::to_string(res.wls.failure_count) + " failures");
    if (res.ml) {
      c.expect(res.ml->failure_count == 0,
               name + ": " + std::to_string(res.ml->failure_count) + " ML failures");
    }
  }
  const int code = run_command(cli + " locate " + scenarios +
                               "/scenario3.json --range 900 --az 10 --el 90 "
                               ">/dev/null 2>/dev/null");
  c.expect(code == 3, "vertical-elevation guard exited " + std::to_string(code));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <uavloc-cli> <scenario-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::string scenarios = argv[2];

  criterion_exact_recovery();
  criterion_b_matrix_oracle();
  criterion_crlb_attainment();
  criterion_jacobian();
  criterion_scenario1();
  criterion_scenario2();
  criterion_scenario3();
  criterion_unbiasedness();
  criterion_determinism(cli, scenarios);
  criterion_failure_accounting(cli, scenarios);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
