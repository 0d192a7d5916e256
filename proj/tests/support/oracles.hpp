#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite. Nothing here calls the code path it is checking.

#include "jdtc/config.hpp"
#include "jdtc/metrics.hpp"
#include "jdtc/phd_filter.hpp"
#include "jdtc/state_space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace jdtc::oracle {

std::string reference_config_path();
ExperimentConfig reference_config();

// ---- quadrature ----

/// Adaptive Gauss-Kronrod on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b);
/// Integral over [a, inf): Gauss-Kronrod on [a, a + 50] plus exp-sinh beyond.
double integrate_tail(const std::function<double(double)>& f, double a);

// ---- OSPA ----

double ospa_brute_force(const std::vector<Eigen::Vector2d>& x, const std::vector<Eigen::Vector2d>& y, double c,
                        double p);

// ---- linear-Gaussian regime ----

struct LinearGaussianSetup {
  double dt = 1.0;
  double accel_psd = 1.0;     // CV l
  double meas_sigma = 10.0;   // per axis, Cartesian sensor
  int particles = 1000;
  int steps = 20;
  int lag = 3;
  bool smooth = true;
  Vector5 initial_mean = (Vector5() << 0.0, 10.0, 0.0, -5.0, 0.0).finished();
  Vector5 initial_sd = (Vector5() << 20.0, 2.0, 20.0, 2.0, 0.0).finished();
};

struct GaussianEstimate {
  Eigen::Vector4d mean;
  Eigen::Matrix4d cov;
};

/// Kalman filter posteriors for scans 0..steps-1 (the first scan updates the
/// initial prior directly) and the fixed-interval RTS pass over them.
std::vector<GaussianEstimate> kalman_filter(const LinearGaussianSetup& s, const std::vector<Eigen::Vector2d>& z);
std::vector<GaussianEstimate> rts_smoother(const LinearGaussianSetup& s, const std::vector<GaussianEstimate>& filtered);

struct LinearGaussianRun {
  std::vector<Eigen::Vector2d> measurements;
  std::vector<Eigen::Vector4d> filter_means;    // particle means, scans 0..steps-1
  std::vector<Eigen::Vector4d> smoother_means;  // scan k-L from the window ending at k; index = scan
  std::vector<double> filter_mass;
  std::vector<double> smoother_mass;
};

/// One target, CV only, P_s = 1, p_D = 1, no clutter, no birth or spawn,
/// Cartesian position sensor. Runs the library's predict / update / resample
/// and fixed-lag smoother.
LinearGaussianRun run_linear_gaussian(const LinearGaussianSetup& s, std::uint64_t seed);

struct AxisScores {
  /// Per axis (x, vx, y, vy): RMS over scans of (particle mean - oracle mean) / oracle sd.
  Eigen::Vector4d filter_rms;
  Eigen::Vector4d smoother_rms;
};

AxisScores score_linear_gaussian(const LinearGaussianSetup& s, const LinearGaussianRun& run);

// ---- mass ledger ----

struct LedgerCase {
  TargetModels models;
  FilterConfig filter;
  ParticleIntensity prior;
  SensorModel sensor;
  std::vector<Detection> detections;
};

LedgerCase random_ledger_case(Rng& rng);

struct LedgerErrors {
  double predict = 0.0;   // max relative error of per-class predicted mass
  double update = 0.0;    // relative error of the updated total mass
  double resample = 0.0;  // max relative error of per-class resampled mass
  bool contributions_in_unit_interval = true;
  bool resample_counts_ok = true;
  bool equal_weights_ok = true;
};

LedgerErrors check_ledger(const LedgerCase& c, Rng& rng);

/// Posterior mass of a single-sensor PHD update, in plain long-double arithmetic.
long double expected_update_mass(const ParticleIntensity& predicted, const std::vector<Detection>& detections,
                                 const SensorModel& sensor);

}  // namespace jdtc::oracle
