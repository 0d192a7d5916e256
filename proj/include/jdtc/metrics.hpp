#pragma once

#include "jdtc/estimation.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

struct OspaParams {
  double cutoff = 1000.0;  // m
  double order = 1.0;

  void validate() const;
};

/// OSPA distance between two finite 2-D point sets:
///   ( (1/n) (min_assign sum min(d, c)^p + c^p |m - n|) )^(1/p),  n = max(|X|, |Y|).
double ospa(const std::vector<Eigen::Vector2d>& estimates, const std::vector<Eigen::Vector2d>& truth,
            const OspaParams& params);

struct LabeledPoint {
  ClassLabel label;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct ClassOspa {
  std::vector<double> per_class;
  double combined = 0.0;  // class-blind
};

/// OSPA restricted to each class, plus the class-blind distance over the union.
ClassOspa per_class_ospa(const std::vector<TrackEstimate>& estimates, const std::vector<LabeledPoint>& truth,
                         int num_classes, const OspaParams& params);

}  // namespace jdtc
