#pragma once

#include "jdtc/state_space.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace jdtc {

/// Per-class weighted particle approximation of the augmented-state PHD at a
/// scan. Class c's mass (weight sum) is the expected number of class-c targets.
struct ParticleIntensity {
  int scan = 0;
  std::vector<std::vector<Particle>> classes;

  ParticleIntensity() = default;
  ParticleIntensity(int num_classes, int scan_index)
      : scan(scan_index), classes(static_cast<std::size_t>(num_classes)) {}

  [[nodiscard]] int num_classes() const { return static_cast<int>(classes.size()); }

  [[nodiscard]] std::vector<Particle>& of(ClassLabel c) { return classes.at(static_cast<std::size_t>(c.index)); }
  [[nodiscard]] const std::vector<Particle>& of(ClassLabel c) const {
    return classes.at(static_cast<std::size_t>(c.index));
  }

  [[nodiscard]] double mass(ClassLabel c) const {
    // Neumaier summation: resampled classes hold thousands of equal weights
    double m = 0.0;
    double comp = 0.0;
    for (const auto& p : of(c)) {
      const double t = m + p.weight;
      comp += std::abs(m) >= std::abs(p.weight) ? (m - t) + p.weight : (p.weight - t) + m;
      m = t;
    }
    return m + comp;
  }

  [[nodiscard]] double total_mass() const {
    double m = 0.0;
    for (int c = 0; c < num_classes(); ++c) m += mass(ClassLabel{c});
    return m;
  }

  [[nodiscard]] std::size_t size() const {
    std::size_t n = 0;
    for (const auto& v : classes) n += v.size();
    return n;
  }
};

}  // namespace jdtc
