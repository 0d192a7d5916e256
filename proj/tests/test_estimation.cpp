#include "jdtc/estimation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace jdtc {
namespace {

Particle at(double w, double x, double y, int cls) {
  Particle p;
  p.weight = w;
  p.state.kin << x, 0.0, y, 0.0, 0.0;
  p.state.label = ClassLabel{cls};
  return p;
}

// Class 1: two Gaussian clouds; class 2 empty.
ParticleIntensity two_clouds(int per_cloud, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, sigma);
  ParticleIntensity in(2, 0);
  for (int i = 0; i < per_cloud; ++i) {
    in.classes[0].push_back(at(1.0 / per_cloud, nd(rng), nd(rng), 0));
    in.classes[0].push_back(at(1.0 / per_cloud, 5000 + nd(rng), -3000 + nd(rng), 0));
  }
  return in;
}

std::vector<TrackEstimate> sorted_by_x(std::vector<TrackEstimate> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.kin[axis::kX] < b.kin[axis::kX]; });
  return v;
}

TEST(RoundCount, NearestWithTiesUp) {
  EXPECT_EQ(round_count(0.0), 0);
  EXPECT_EQ(round_count(-0.3), 0);
  EXPECT_EQ(round_count(0.49), 0);
  EXPECT_EQ(round_count(0.5), 1);
  EXPECT_EQ(round_count(1.5), 2);
  EXPECT_EQ(round_count(2.49), 2);
  EXPECT_EQ(round_count(2.5), 3);
}

TEST(EstimateCardinality, RoundsEachClass) {
  ParticleIntensity in(2, 0);
  for (int i = 0; i < 19; ++i) in.classes[0].push_back(at(0.1, i, 0, 0));
  for (int i = 0; i < 22; ++i) in.classes[1].push_back(at(0.1, i, 0, 1));
  const auto card = estimate_cardinality(in);
  EXPECT_NEAR(card.masses[0], 1.9, 1e-12);
  EXPECT_NEAR(card.masses[1], 2.2, 1e-12);
  EXPECT_EQ(card.counts, (std::vector<int>{2, 2}));
  EXPECT_EQ(card.total, 4);
}

TEST(ExtractStates, EmptyIntensityGivesNoEstimates) {
  Rng rng(1);
  const auto ex = extract_states(ParticleIntensity(3, 0), rng);
  EXPECT_TRUE(ex.estimates.empty());
  EXPECT_TRUE(ex.reduced.empty());
}

TEST(ExtractStates, SingleParticle) {
  Rng rng(2);
  ParticleIntensity in(1, 0);
  in.classes[0].push_back(at(1.0, 123.0, -45.0, 0));
  const auto ex = extract_states(in, rng);
  ASSERT_EQ(ex.estimates.size(), 1u);
  EXPECT_EQ(ex.estimates[0].kin[axis::kX], 123.0);
  EXPECT_EQ(ex.estimates[0].kin[axis::kY], -45.0);
  EXPECT_EQ(ex.estimates[0].cluster_mass, 1.0);
}

TEST(ExtractStates, SeparatedCloudsRecoverTheirMeans) {
  const int n = 500;
  const double sigma = 50.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto in = two_clouds(n, sigma, seed);
    Rng rng(seed);
    const auto est = sorted_by_x(extract_states(in, rng).estimates);
    ASSERT_EQ(est.size(), 2u);
    const double bound = 3 * sigma / std::sqrt(n);
    EXPECT_NEAR(est[0].kin[axis::kX], 0.0, bound);
    EXPECT_NEAR(est[0].kin[axis::kY], 0.0, bound);
    EXPECT_NEAR(est[1].kin[axis::kX], 5000.0, bound);
    EXPECT_NEAR(est[1].kin[axis::kY], -3000.0, bound);
  }
}

TEST(ExtractStates, ClusterMassesPartitionTheClass) {
  const auto in = two_clouds(300, 400.0, 7);
  Rng rng(7);
  const auto ex = extract_states(in, rng);
  double total = 0.0;
  for (const auto& e : ex.estimates) total += e.cluster_mass;
  EXPECT_NEAR(total, in.mass(ClassLabel{0}), 1e-9);
}

TEST(ExtractStates, InvariantToParticleOrder) {
  auto in = two_clouds(300, 50.0, 8);
  Rng rng(8);
  const auto a = sorted_by_x(extract_states(in, rng).estimates);
  Rng shuffle(99);
  std::shuffle(in.classes[0].begin(), in.classes[0].end(), shuffle);
  const auto b = sorted_by_x(extract_states(in, rng).estimates);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT((a[i].kin - b[i].kin).norm(), 1e-6);
}

TEST(ExtractStates, FlagsReducedClusterCount) {
  Rng rng(9);
  ParticleIntensity in(2, 0);
  for (int i = 0; i < 6; ++i) in.classes[1].push_back(at(0.5, i % 2 == 0 ? 0.0 : 100.0, 0.0, 1));
  const auto ex = extract_states(in, rng);
  EXPECT_EQ(ex.estimates.size(), 2u);
  ASSERT_EQ(ex.reduced.size(), 1u);
  EXPECT_EQ(ex.reduced[0], ClassLabel{1});
}

TEST(ExtractStates, GathersNearbyOtherClassMass) {
  Rng rng(10);
  ParticleIntensity in(2, 0);
  for (int i = 0; i < 10; ++i) {
    in.classes[0].push_back(at(0.1, 10.0 * i, 0.0, 0));
    in.classes[1].push_back(at(0.02, 10.0 * i, 5.0, 1));
    in.classes[1].push_back(at(0.02, 1e5, 1e5, 1));
  }
  const auto ex = extract_states(in, rng);
  ASSERT_EQ(ex.estimates.size(), 1u);
  EXPECT_NEAR(ex.estimates[0].class_masses[0], 1.0, 1e-12);
  EXPECT_NEAR(ex.estimates[0].class_masses[1], 0.2, 1e-12);
}

}  // namespace
}  // namespace jdtc
