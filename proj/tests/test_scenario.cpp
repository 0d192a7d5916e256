#include "jdtc/scenario.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace jdtc {
namespace {

ScenarioConfig reference() { return oracle::reference_config().scenario; }

// One stationary class-1 target far from both sensors, observed for `scans` scans.
ScenarioConfig single_target(int scans, double tau, double clutter_rate) {
  auto cfg = reference();
  cfg.duration_s = cfg.dt_s * (scans - 1);
  TargetSpec t;
  t.id = 1;
  t.label = ClassLabel{0};
  t.birth_s = 0.0;
  t.death_s = cfg.duration_s + cfg.dt_s;
  t.initial << 5000.0, 0.0, 5000.0, 0.0, 0.0;
  cfg.targets = {t};
  for (auto& s : cfg.sensors) s.threshold = tau;
  cfg.clutter.rate = clutter_rate;
  return cfg;
}

TEST(ReferenceScenario, ScanCount) {
  const auto cfg = reference();
  EXPECT_EQ(cfg.num_scans(), 84);
  EXPECT_DOUBLE_EQ(cfg.time_of(83), 498.0);
}

TEST(GroundTruth, ThreeTargetsAtStart) {
  const auto truth = generate_truth(reference());
  EXPECT_EQ(truth.scans[0].size(), 3u);
  EXPECT_EQ(truth.class_counts(0, 2), (std::vector<int>{2, 1}));
}

TEST(GroundTruth, FourthTargetAppearsAtTwoMinutes) {
  const auto truth = generate_truth(reference());
  EXPECT_EQ(truth.scans[19].size(), 3u);
  EXPECT_EQ(truth.scans[20].size(), 4u);
  const auto& t4 = truth.scans[20].back();
  EXPECT_EQ(t4.target_id, 4);
  EXPECT_DOUBLE_EQ(t4.kin[axis::kX], 1400.0);
  EXPECT_DOUBLE_EQ(t4.kin[axis::kY], 8000.0);
}

TEST(GroundTruth, OnlyFourthTargetAfterSixMinutes) {
  const auto truth = generate_truth(reference());
  const auto& at366 = truth.scans[61];
  ASSERT_EQ(at366.size(), 1u);
  EXPECT_EQ(at366[0].target_id, 4);
  EXPECT_TRUE(truth.scans[80].empty());
}

TEST(GroundTruth, ParallelPairKeepsItsSeparation) {
  const auto truth = generate_truth(reference());
  for (int k = 0; k < 60; ++k) {
    Eigen::Vector2d p2 = Eigen::Vector2d::Zero();
    Eigen::Vector2d p3 = Eigen::Vector2d::Zero();
    for (const auto& rec : truth.scans[static_cast<std::size_t>(k)]) {
      const Eigen::Vector2d p(rec.kin[axis::kX], rec.kin[axis::kY]);
      if (rec.target_id == 2) p2 = p;
      if (rec.target_id == 3) p3 = p;
    }
    EXPECT_NEAR((p2 - p3).norm(), 500.0, 1e-6) << "scan " << k;
  }
}

TEST(GroundTruth, SpeedIsFortyMetresPerSecond) {
  const auto truth = generate_truth(reference());
  for (const auto& rec : truth.scans[10]) {
    EXPECT_NEAR(std::hypot(rec.kin[axis::kVx], rec.kin[axis::kVy]), 40.0, 1e-9);
  }
}

TEST(GroundTruth, TurnSegmentsFollowTheTurnRate) {
  auto cfg = single_target(11, 0.0, 0.0);
  cfg.targets[0].initial << 0.0, 40.0, 0.0, 0.0, 0.0;
  cfg.targets[0].segments = {{30.0, MotionMode::kCT, 0.05}};
  const auto truth = generate_truth(cfg);
  const auto& k5 = truth.scans[5][0].kin;
  EXPECT_NEAR(std::atan2(k5[axis::kVy], k5[axis::kVx]), 0.05 * 30.0, 1e-9);
  EXPECT_NEAR(std::hypot(k5[axis::kVx], k5[axis::kVy]), 40.0, 1e-9);
  // Constant velocity after the last segment.
  const auto& k10 = truth.scans[10][0].kin;
  EXPECT_NEAR(k10[axis::kX] - k5[axis::kX], 30.0 * k5[axis::kVx], 1e-6);
}

TEST(Measurements, NoThresholdNoClutterOneDetectionPerTargetPerSensor) {
  auto cfg = reference();
  for (auto& s : cfg.sensors) s.threshold = 0.0;
  cfg.clutter.rate = 0.0;
  const auto truth = generate_truth(cfg);
  const auto scans = generate_measurements(truth, cfg, 3);
  for (std::size_t k = 0; k < scans.size(); ++k) {
    for (std::size_t s = 0; s < cfg.sensors.size(); ++s) {
      EXPECT_EQ(scans[k][s].size(), truth.scans[k].size()) << "scan " << k;
      for (const auto& d : scans[k][s]) EXPECT_EQ(d.sensor_id, cfg.sensors[s].id);
    }
  }
}

TEST(Measurements, DetectionFrequencyMatchesDetectionProbability) {
  const int scans = 10000;
  const auto cfg = single_target(scans, 3.0, 0.0);
  const auto meas = generate_measurements(generate_truth(cfg), cfg, 4);
  const double pd = p_d(3.0, cfg.classes[0].band());
  for (std::size_t s = 0; s < cfg.sensors.size(); ++s) {
    int hits = 0;
    for (const auto& scan : meas) hits += static_cast<int>(scan[s].size());
    EXPECT_NEAR(static_cast<double>(hits) / scans, pd, 0.01) << "sensor " << s;
  }
}

TEST(Measurements, AmplitudesClearTheThreshold) {
  const auto cfg = reference();
  const auto meas = generate_measurements(generate_truth(cfg), cfg, 5);
  for (const auto& scan : meas) {
    for (std::size_t s = 0; s < scan.size(); ++s) {
      for (const auto& d : scan[s]) {
        EXPECT_GE(d.amplitude, cfg.sensors[s].threshold);
        EXPECT_GE(d.range(), 0.0);
        EXPECT_GE(d.bearing(), -std::numbers::pi);
        EXPECT_LT(d.bearing(), std::numbers::pi + 1e-12);
      }
    }
  }
}

TEST(Measurements, MeanCountIsDetectionsPlusClutter) {
  const int scans = 4000;
  const auto cfg = single_target(scans, 3.0, 10.0);
  const auto meas = generate_measurements(generate_truth(cfg), cfg, 6);
  const double want = p_d(3.0, cfg.classes[0].band()) + 10.0;
  double total = 0.0;
  for (const auto& scan : meas) total += static_cast<double>(scan[0].size());
  // 4 standard errors of a Poisson(10) mean.
  EXPECT_NEAR(total / scans, want, 4.0 * std::sqrt(want / scans));
}

TEST(Measurements, SameSeedSameDetections) {
  const auto cfg = reference();
  const auto truth = generate_truth(cfg);
  const auto a = generate_measurements(truth, cfg, 7);
  const auto b = generate_measurements(truth, cfg, 7);
  const auto c = generate_measurements(truth, cfg, 8);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t s = 0; s < a[k].size(); ++s) {
      ASSERT_EQ(a[k][s].size(), b[k][s].size());
      for (std::size_t j = 0; j < a[k][s].size(); ++j) {
        EXPECT_EQ(a[k][s][j].z, b[k][s][j].z);
        EXPECT_EQ(a[k][s][j].amplitude, b[k][s][j].amplitude);
      }
      if (a[k][s].size() != c[k][s].size()) differs = true;
    }
  }
  EXPECT_TRUE(differs);
}

TEST(ScenarioConfig, ValidationRejectsBadTargets) {
  auto cfg = reference();
  cfg.targets[0].death_s = cfg.targets[0].birth_s;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = reference();
  cfg.targets[0].label = ClassLabel{5};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(MakeStream, DistinctArgumentsGiveDistinctStreams) {
  auto a = make_stream(1, 2, 3);
  auto b = make_stream(1, 2, 3);
  auto c = make_stream(1, 2, 4);
  auto d = make_stream(2, 2, 3);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

}  // namespace
}  // namespace jdtc
