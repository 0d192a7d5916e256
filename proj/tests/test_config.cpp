#include "jdtc/config.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace jdtc {
namespace {

std::string reference_text() {
  std::ifstream in(oracle::reference_config_path());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, ReferenceScenarioValues) {
  const auto cfg = oracle::reference_config();
  const auto& sc = cfg.scenario;
  EXPECT_EQ(sc.dt_s, 6.0);
  EXPECT_EQ(sc.num_scans(), 84);
  ASSERT_EQ(sc.num_classes(), 2);
  EXPECT_EQ(sc.classes[0].snr_low_db, 30.0);
  EXPECT_EQ(sc.classes[1].snr_high_db, 30.0);
  EXPECT_EQ(sc.survival_probability, 0.99);
  ASSERT_EQ(sc.sensors.size(), 2u);
  EXPECT_EQ(sc.sensors[0].position, Eigen::Vector2d(1000.0, 0.0));
  EXPECT_EQ(sc.sensors[1].position, Eigen::Vector2d(0.0, 0.0));
  EXPECT_EQ(sc.sensors[0].range_sigma, 300.0);
  EXPECT_EQ(sc.clutter.rate, 10.0);
  EXPECT_EQ(sc.targets.size(), 4u);
  EXPECT_EQ(sc.targets[3].label, ClassLabel{1});
  EXPECT_EQ(cfg.filter.resampling.particles_per_target, 500);
  EXPECT_EQ(cfg.filter.sensor_order, (std::vector<int>{1, 2}));
  EXPECT_EQ(cfg.smoother.lag, 3);
  EXPECT_EQ(cfg.smoother.gating.radius, 8.0);
  EXPECT_EQ(cfg.ospa.cutoff, 1000.0);
  EXPECT_EQ(cfg.window_first, 10);
  EXPECT_EQ(cfg.window_last, 55);
  double birth1 = 0.0;
  for (const auto& g : sc.birth[0]) birth1 += g.weight;
  EXPECT_NEAR(birth1, 0.02, 1e-15);
}

TEST(Config, EmitParseRoundTrip) {
  const auto cfg = oracle::reference_config();
  const std::string once = emit_config(cfg);
  const auto back = parse_config(once);
  EXPECT_EQ(emit_config(back), once);
  EXPECT_EQ(back.scenario.targets[0].initial, cfg.scenario.targets[0].initial);
  EXPECT_EQ(back.scenario.birth[1][1].cov, cfg.scenario.birth[1][1].cov);
  EXPECT_EQ(back.scenario.sensors[0].bearing_sigma, cfg.scenario.sensors[0].bearing_sigma);
}

TEST(Config, UnconfiguredClassIsNamed) {
  const auto msg = error_of(replaced(reference_text(), "# southeast\n    class: 1", "# southeast\n    class: 3"));
  EXPECT_NE(msg.find("targets[0].class"), std::string::npos) << msg;
  EXPECT_NE(msg.find("class 3"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyIsRejected) {
  const auto msg = error_of(replaced(reference_text(), "  lag: 3", "  lagg: 3"));
  EXPECT_NE(msg.find("smoother"), std::string::npos) << msg;
  EXPECT_NE(msg.find("lagg"), std::string::npos) << msg;
}

TEST(Config, MissingKeyIsNamed) {
  const auto msg = error_of(replaced(reference_text(), "  max_range: 15000", ""));
  EXPECT_NE(msg.find("clutter"), std::string::npos) << msg;
  EXPECT_NE(msg.find("max_range"), std::string::npos) << msg;
}

TEST(Config, InvalidValuesAreRejected) {
  EXPECT_NE(error_of(replaced(reference_text(), "survival_probability: 0.99", "survival_probability: 1.5")), "");
  EXPECT_NE(error_of(replaced(reference_text(), "  lag: 3", "  lag: -1")), "");
  EXPECT_NE(error_of("scenario: [1, 2"), "");
  EXPECT_NE(error_of("- 1\n- 2\n"), "");
}

TEST(Config, MissingFileIsAConfigError) { EXPECT_THROW(load_config("/nonexistent/scenario.yaml"), ConfigError); }

TEST(Overrides, TakePrecedence) {
  auto cfg = oracle::reference_config();
  Overrides o;
  o.seed = 42;
  o.lag = 0;
  o.particles = 100;
  o.clutter_rate = 2.5;
  o.gate_radius = 5.0;
  o.no_smoother = true;
  apply_overrides(cfg, o);
  EXPECT_EQ(cfg.scenario.seed, 42u);
  EXPECT_EQ(cfg.smoother.lag, 0);
  EXPECT_EQ(cfg.filter.resampling.particles_per_target, 100);
  EXPECT_EQ(cfg.filter.resampling.particles_per_birth, 100);
  EXPECT_EQ(cfg.scenario.clutter.rate, 2.5);
  EXPECT_EQ(cfg.smoother.gating.radius, 5.0);
  EXPECT_FALSE(cfg.smoother_enabled);
}

TEST(Overrides, InvalidValuesAreRejected) {
  auto cfg = oracle::reference_config();
  Overrides o;
  o.lag = -2;
  EXPECT_THROW(apply_overrides(cfg, o), ConfigError);
}

}  // namespace
}  // namespace jdtc
