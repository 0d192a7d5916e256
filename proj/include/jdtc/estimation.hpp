#pragma once

#include "jdtc/particles.hpp"
#include "jdtc/state_space.hpp"

#include <vector>

namespace jdtc {

struct TrackEstimate {
  KinematicState kin = KinematicState::Zero();
  ClassLabel label;
  /// Mass of each class near the estimate; the own-class entry is cluster_mass.
  std::vector<double> class_masses;
  double cluster_mass = 0.0;
};

struct Cardinality {
  std::vector<double> masses;
  std::vector<int> counts;
  int total = 0;
};

/// Nearest-integer rounding with ties rounded up.
int round_count(double mass);

Cardinality estimate_cardinality(const ParticleIntensity& intensity);

struct ExtractionConfig {
  int max_iterations = 50;
  double tolerance = 1e-6;
  /// Other-class mass is gathered within this many cluster RMS radii (at least 1 m).
  double class_gate = 3.0;
};

struct Extraction {
  std::vector<TrackEstimate> estimates;
  /// Classes whose k had to be reduced below the rounded count.
  std::vector<ClassLabel> reduced;
};

/// Weighted k-means over each class's particle positions, k = rounded class mass.
Extraction extract_states(const ParticleIntensity& intensity, Rng& rng, const ExtractionConfig& config = {});

/// Clustering of one weighted 2-D point set. Returns cluster index per point
/// and the number of clusters actually used (<= k).
struct Clustering {
  std::vector<int> assignment;
  int k = 0;
};

Clustering weighted_kmeans(const std::vector<Eigen::Vector2d>& points, const std::vector<double>& weights, int k,
                           Rng& rng, int max_iterations, double tolerance);

}  // namespace jdtc
