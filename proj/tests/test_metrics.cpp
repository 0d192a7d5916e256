#include "jdtc/metrics.hpp"

#include "jdtc/assignment.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace jdtc {
namespace {

using Points = std::vector<Eigen::Vector2d>;

TrackEstimate estimate(double x, double y, int cls) {
  TrackEstimate e;
  e.kin << x, 0.0, y, 0.0, 0.0;
  e.label = ClassLabel{cls};
  return e;
}

Points random_points(Rng& rng, int max_n) {
  std::uniform_int_distribution<int> n(0, max_n);
  std::uniform_real_distribution<double> u(-1500.0, 1500.0);
  Points p(static_cast<std::size_t>(n(rng)));
  for (auto& v : p) v = {u(rng), u(rng)};
  return p;
}

TEST(Ospa, IdenticalSetsAreZero) {
  const Points x{{1, 2}, {300, -40}, {-7, 7}};
  EXPECT_EQ(ospa(x, x, OspaParams{}), 0.0);
  EXPECT_EQ(ospa({}, {}, OspaParams{}), 0.0);
}

TEST(Ospa, EmptyAgainstNonEmptyIsCutoff) {
  EXPECT_DOUBLE_EQ(ospa({}, {{0, 0}, {5, 5}}, OspaParams{}), 1000.0);
  EXPECT_DOUBLE_EQ(ospa({{0, 0}}, {}, OspaParams{1000.0, 2.0}), 1000.0);
}

TEST(Ospa, OneMissingOfTwo) {
  // One exact match plus one unmatched point: (0 + c) / 2.
  EXPECT_DOUBLE_EQ(ospa({{0, 0}}, {{0, 0}, {5000, 0}}, OspaParams{}), 500.0);
}

TEST(Ospa, DistancesSaturateAtCutoff) {
  EXPECT_DOUBLE_EQ(ospa({{0, 0}}, {{3, 4}}, OspaParams{}), 5.0);
  EXPECT_DOUBLE_EQ(ospa({{0, 0}}, {{3000, 4000}}, OspaParams{}), 1000.0);
}

TEST(Ospa, RejectsInvalidParameters) {
  EXPECT_THROW(ospa({}, {}, OspaParams{0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(ospa({}, {}, OspaParams{100.0, 0.5}), std::invalid_argument);
}

TEST(PerClassOspa, WrongClassCostsBothClasses) {
  // Estimate sits on the truth but carries the other label.
  const std::vector<TrackEstimate> est{estimate(0, 0, 1)};
  const std::vector<LabeledPoint> truth{{ClassLabel{0}, {0, 0}}};
  const auto r = per_class_ospa(est, truth, 2, OspaParams{});
  EXPECT_DOUBLE_EQ(r.per_class[0], 1000.0);
  EXPECT_DOUBLE_EQ(r.per_class[1], 1000.0);
  EXPECT_DOUBLE_EQ(r.combined, 0.0);
}

TEST(PerClassOspa, SplitsByLabel) {
  const std::vector<TrackEstimate> est{estimate(0, 0, 0), estimate(100, 0, 1)};
  const std::vector<LabeledPoint> truth{{ClassLabel{0}, {0, 10}}, {ClassLabel{1}, {100, 0}}, {ClassLabel{1}, {9000, 0}}};
  const auto r = per_class_ospa(est, truth, 2, OspaParams{});
  EXPECT_DOUBLE_EQ(r.per_class[0], 10.0);
  EXPECT_DOUBLE_EQ(r.per_class[1], 500.0);
  EXPECT_NEAR(r.combined, (10.0 + 0.0 + 1000.0) / 3.0, 1e-12);
}

TEST(Ospa, MetricAxiomsOnRandomTriples) {
  Rng rng(1);
  for (const double p : {1.0, 2.0}) {
    const OspaParams params{1000.0, p};
    for (int t = 0; t < 100; ++t) {
      const auto x = random_points(rng, 4);
      const auto y = random_points(rng, 4);
      const auto z = random_points(rng, 4);
      const double xy = ospa(x, y, params);
      EXPECT_NEAR(xy, ospa(y, x, params), 1e-9);
      EXPECT_GE(xy, 0.0);
      EXPECT_LE(xy, 1000.0 + 1e-9);
      EXPECT_LE(xy, ospa(x, z, params) + ospa(z, y, params) + 1e-9);
    }
  }
}

TEST(Ospa, MatchesBruteForce) {
  Rng rng(2);
  for (const double p : {1.0, 2.0, 3.0}) {
    for (int t = 0; t < 200; ++t) {
      const auto x = random_points(rng, 4);
      const auto y = random_points(rng, 4);
      EXPECT_NEAR(ospa(x, y, OspaParams{1000.0, p}), oracle::ospa_brute_force(x, y, 1000.0, p), 1e-9);
    }
  }
}

TEST(Assignment, SquareAndRectangular) {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto a = solve_assignment(c);
  EXPECT_DOUBLE_EQ(a.cost, 5.0);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{1, 0, 2}));

  Eigen::MatrixXd wide(2, 4);
  wide << 9, 1, 9, 9, 9, 9, 9, 2;
  const auto w = solve_assignment(wide);
  EXPECT_DOUBLE_EQ(w.cost, 3.0);
  EXPECT_EQ(w.row_to_col, (std::vector<int>{1, 3}));

  Eigen::MatrixXd tall(3, 1);
  tall << 5, 1, 7;
  const auto t = solve_assignment(tall);
  EXPECT_DOUBLE_EQ(t.cost, 1.0);
  EXPECT_EQ(t.row_to_col, (std::vector<int>{-1, 0, -1}));

  EXPECT_EQ(solve_assignment(Eigen::MatrixXd(0, 3)).cost, 0.0);
}

}  // namespace
}  // namespace jdtc
