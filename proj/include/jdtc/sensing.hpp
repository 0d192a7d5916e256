#pragma once

#include "jdtc/state_space.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

/// Polar sensors report (range, bearing). Cartesian sensors report (x, y)
/// directly; they exist for linear-Gaussian oracle tests.
enum class SensorKind { kPolar, kCartesian };

struct SensorConfig {
  int id = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double range_sigma = 300.0;  // m (x/y sigma for Cartesian sensors)
  double bearing_sigma = 0.017453292519943295;  // rad (unused for Cartesian)
  double threshold = 0.0;  // amplitude detection threshold tau
  SensorKind kind = SensorKind::kPolar;

  void validate() const;
};

/// Kinematic part z = (range m, bearing rad) for polar sensors, (x, y) for
/// Cartesian ones; feature part is the envelope amplitude.
struct Detection {
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  double amplitude = 0.0;
  int sensor_id = 0;

  [[nodiscard]] double range() const { return z[0]; }
  [[nodiscard]] double bearing() const { return z[1]; }
};

/// Average-SNR interval [d1, d2] as linear power ratios.
struct SnrBand {
  double d1 = 0.0;
  double d2 = 0.0;

  static SnrBand from_db(double low_db, double high_db);
  void validate() const;
};

/// Poisson clutter, uniform over [0, 2pi) x [0, max_range] in (bearing, range).
struct ClutterModel {
  double rate = 0.0;          // expected detections per sensor per scan, post-threshold
  double max_range = 15000.0;  // m

  /// Spatial density of one clutter point in the sensor's measurement space.
  [[nodiscard]] double spatial_density(const SensorConfig& sensor) const;
};

double wrap_angle(double a);

/// Noise-free observation. Throws when the target sits on a polar sensor.
Eigen::Vector2d observe(const KinematicState& kin, const SensorConfig& sensor);

/// Noise-free observation without the coincidence check (bearing 0 at the sensor).
Eigen::Vector2d predicted_measurement(const KinematicState& kin, const SensorConfig& sensor);

/// Log measurement density of z given a predicted observation, bearing residual wrapped.
double log_measurement_density(const Eigen::Vector2d& z, const Eigen::Vector2d& predicted, const SensorConfig& sensor);

double log_kinematic_likelihood(const Detection& z, const KinematicState& kin, const SensorConfig& sensor);
double kinematic_likelihood(const Detection& z, const KinematicState& kin, const SensorConfig& sensor);

// ---- Amplitude densities ----

/// Rayleigh(1) clutter amplitude density g0(a) = a exp(-a^2 / 2).
double clutter_amp_pdf(double a);
double log_clutter_amp_pdf(double a);

/// Rayleigh amplitude with its mean power 1 + d integrated over a
/// log-uniform (1 + d) in [1 + d1, 1 + d2]:
///   g_a(a) = 2 (exp(-a^2 / 2(1+d2)) - exp(-a^2 / 2(1+d1))) / (a ln((1+d2)/(1+d1))).
double target_amp_pdf(double a, const SnrBand& band);
double log_target_amp_pdf(double a, const SnrBand& band);

/// Clutter exceedance probability exp(-tau^2 / 2).
double p_fa(double tau);

/// Target exceedance probability, the tail integral of target_amp_pdf from tau.
/// Evaluated in closed form through the exponential integral E1.
double p_d(double tau, const SnrBand& band);

/// 1 - p_d, accurate when p_d is close to one.
double p_miss(double tau, const SnrBand& band);

struct AmplitudeDensities {
  double clutter = 0.0;
  double target = 0.0;
};

/// Densities conditioned on a >= tau: g0 / p_fa and g_a / p_d.
AmplitudeDensities amp_likelihoods_thresholded(double a, double tau, const SnrBand& band);

/// Inverse-CDF draw from g0 restricted to [tau, inf).
double sample_clutter_amplitude(double tau, Rng& rng);

/// Rayleigh draw with mean power 1 + d, d log-uniform (in 1 + d) over the band.
double sample_target_amplitude(const SnrBand& band, Rng& rng);

std::vector<Detection> sample_clutter(const ClutterModel& model, const SensorConfig& sensor, Rng& rng);

}  // namespace jdtc
