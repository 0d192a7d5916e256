#pragma once

#include "jdtc/metrics.hpp"
#include "jdtc/phd_filter.hpp"
#include "jdtc/sensing.hpp"
#include "jdtc/state_space.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jdtc {

struct ClassSpec {
  std::string name;
  double snr_low_db = 0.0;
  double snr_high_db = 0.0;

  [[nodiscard]] SnrBand band() const { return SnrBand::from_db(snr_low_db, snr_high_db); }
};

/// A stretch of a ground-truth trajectory flown under one motion model. After
/// the last segment the target continues at constant velocity.
struct TruthSegment {
  double duration_s = 0.0;
  MotionMode mode = MotionMode::kCV;
  double turn_rate = 0.0;  // rad/s, CT only
};

struct TargetSpec {
  int id = 0;
  ClassLabel label;
  double birth_s = 0.0;
  double death_s = 0.0;
  KinematicState initial = KinematicState::Zero();
  std::vector<TruthSegment> segments;
};

struct SpawnSpec {
  double rate = 0.0;
  Vector5 cov_diag = Vector5::Ones();
  Eigen::Matrix2d mode_transition = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd class_transition;
};

/// Ground truth, sensors, clutter and the target model parameters.
struct ScenarioConfig {
  double dt_s = 6.0;
  double duration_s = 498.0;
  std::uint64_t seed = 1;

  std::vector<ClassSpec> classes;
  MotionNoise motion_noise;
  /// One 2x2 mode transition per class.
  std::vector<Eigen::Matrix2d> mode_transition;
  double survival_probability = 0.99;
  /// Birth components per class.
  std::vector<std::vector<GaussianComponent>> birth;
  SpawnSpec spawn;

  std::vector<SensorConfig> sensors;
  ClutterModel clutter;
  std::vector<TargetSpec> targets;

  [[nodiscard]] int num_classes() const { return static_cast<int>(classes.size()); }
  /// Scans at t = k dT for every k with k dT <= duration.
  [[nodiscard]] int num_scans() const;
  [[nodiscard]] double time_of(int scan) const { return scan * dt_s; }

  void validate() const;
};

TargetModels build_models(const ScenarioConfig& cfg);
std::vector<SensorModel> build_sensor_models(const ScenarioConfig& cfg);

struct TruthRecord {
  int target_id = 0;
  ClassLabel label;
  KinematicState kin = KinematicState::Zero();
};

struct GroundTruth {
  double dt_s = 0.0;
  std::vector<std::vector<TruthRecord>> scans;

  [[nodiscard]] std::vector<LabeledPoint> positions(int scan) const;
  [[nodiscard]] std::vector<int> class_counts(int scan, int num_classes) const;
};

/// Deterministic piecewise CV/CT trajectories. A target is present at scans
/// with birth_s <= t < death_s.
GroundTruth generate_truth(const ScenarioConfig& cfg);

/// Detections of one scan, one list per sensor in configuration order.
using ScanDetections = std::vector<std::vector<Detection>>;

/// Per target and sensor: amplitude from the class's unknown-SNR law, kept
/// iff it clears the threshold; kinematics observed with Gaussian polar noise.
/// Poisson clutter is appended. Each scan draws from its own substream of `seed`.
std::vector<ScanDetections> generate_measurements(const GroundTruth& truth, const ScenarioConfig& cfg,
                                                  std::uint64_t seed);

/// Random stream for (seed, purpose, index); distinct arguments give independent streams.
Rng make_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

}  // namespace jdtc
