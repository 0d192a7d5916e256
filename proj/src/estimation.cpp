#include "jdtc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace jdtc {

int round_count(double mass) {
  if (!(mass > 0.0)) return 0;
  return static_cast<int>(std::floor(mass + 0.5));
}

Cardinality estimate_cardinality(const ParticleIntensity& intensity) {
  Cardinality card;
  for (int c = 0; c < intensity.num_classes(); ++c) {
    const double m = intensity.mass(ClassLabel{c});
    card.masses.push_back(m);
    card.counts.push_back(round_count(m));
    card.total += card.counts.back();
  }
  return card;
}

namespace {

std::size_t pick_weighted(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (double v : w) total += v;
  std::uniform_real_distribution<double> uni(0.0, total);
  const double u = uni(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc && w[i] > 0.0) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return 0;
}

}  // namespace

Clustering weighted_kmeans(const std::vector<Eigen::Vector2d>& points, const std::vector<double>& weights, int k,
                           Rng& rng, int max_iterations, double tolerance) {
  Clustering out;
  out.assignment.assign(points.size(), 0);
  if (points.empty() || k <= 0) return out;

  std::set<std::pair<double, double>> distinct;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] > 0.0) distinct.emplace(points[i].x(), points[i].y());
  }
  k = std::min<int>(k, static_cast<int>(distinct.size()));
  if (k == 0) return out;

  // k-means++ seeding, weighted by particle mass.
  std::vector<Eigen::Vector2d> centers;
  centers.push_back(points[pick_weighted(weights, rng)]);
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  std::vector<double> seed_w(points.size());
  while (static_cast<int>(centers.size()) < k) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
      seed_w[i] = weights[i] * d2[i];
    }
    centers.push_back(points[pick_weighted(seed_w, rng)]);
  }

  std::vector<Eigen::Vector2d> sum(static_cast<std::size_t>(k));
  std::vector<double> mass(static_cast<std::size_t>(k));
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::fill(sum.begin(), sum.end(), Eigen::Vector2d::Zero());
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double d = (points[i] - centers[static_cast<std::size_t>(j)]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      out.assignment[i] = best;
      sum[static_cast<std::size_t>(best)] += weights[i] * points[i];
      mass[static_cast<std::size_t>(best)] += weights[i];
    }
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (mass[js] <= 0.0) continue;
      const Eigen::Vector2d next = sum[js] / mass[js];
      shift = std::max(shift, (next - centers[js]).norm() / std::max(1.0, next.norm()));
      centers[js] = next;
    }
    if (shift < tolerance) break;
  }

  // Final assignment against the converged centres, then drop empty clusters.
  std::fill(mass.begin(), mass.end(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double d = (points[i] - centers[static_cast<std::size_t>(j)]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.assignment[i] = best;
    mass[static_cast<std::size_t>(best)] += weights[i];
  }
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int used = 0;
  for (int j = 0; j < k; ++j) {
    if (mass[static_cast<std::size_t>(j)] > 0.0) remap[static_cast<std::size_t>(j)] = used++;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    int r = remap[static_cast<std::size_t>(out.assignment[i])];
    // zero-weight points in dropped clusters join cluster 0
    out.assignment[i] = r < 0 ? 0 : r;
  }
  out.k = used;
  return out;
}

Extraction extract_states(const ParticleIntensity& intensity, Rng& rng, const ExtractionConfig& config) {
  Extraction result;
  const int num_classes = intensity.num_classes();
  const Cardinality card = estimate_cardinality(intensity);

  for (int c = 0; c < num_classes; ++c) {
    const int n = card.counts[static_cast<std::size_t>(c)];
    if (n == 0) continue;
    const auto& particles = intensity.of(ClassLabel{c});
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;
    points.reserve(particles.size());
    weights.reserve(particles.size());
    for (const auto& p : particles) {
      points.emplace_back(p.state.kin[axis::kX], p.state.kin[axis::kY]);
      weights.push_back(p.weight);
    }
    const Clustering cl = weighted_kmeans(points, weights, n, rng, config.max_iterations, config.tolerance);
    if (cl.k < n) result.reduced.push_back(ClassLabel{c});

    std::vector<Vector5> sums(static_cast<std::size_t>(cl.k), Vector5::Zero());
    std::vector<double> masses(static_cast<std::size_t>(cl.k), 0.0);
    for (std::size_t i = 0; i < particles.size(); ++i) {
      const auto j = static_cast<std::size_t>(cl.assignment[i]);
      sums[j] += particles[i].weight * particles[i].state.kin;
      masses[j] += particles[i].weight;
    }
    for (int j = 0; j < cl.k; ++j) {
      const auto js = static_cast<std::size_t>(j);
      TrackEstimate est;
      est.label = ClassLabel{c};
      est.cluster_mass = masses[js];
      est.kin = sums[js] / masses[js];
      result.estimates.push_back(est);
    }

    // RMS radius per cluster, for the other-class neighbourhood.
    const std::size_t first = result.estimates.size() - static_cast<std::size_t>(cl.k);
    std::vector<double> spread(static_cast<std::size_t>(cl.k), 0.0);
    for (std::size_t i = 0; i < particles.size(); ++i) {
      const auto j = static_cast<std::size_t>(cl.assignment[i]);
      const auto& e = result.estimates[first + j];
      const Eigen::Vector2d d(particles[i].state.kin[axis::kX] - e.kin[axis::kX],
                              particles[i].state.kin[axis::kY] - e.kin[axis::kY]);
      spread[j] += particles[i].weight * d.squaredNorm();
    }
    for (int j = 0; j < cl.k; ++j) {
      auto& e = result.estimates[first + static_cast<std::size_t>(j)];
      const double rms = std::sqrt(spread[static_cast<std::size_t>(j)] / e.cluster_mass);
      const double gate = std::max(1.0, config.class_gate * rms);
      e.class_masses.assign(static_cast<std::size_t>(num_classes), 0.0);
      for (int other = 0; other < num_classes; ++other) {
        if (other == c) {
          e.class_masses[static_cast<std::size_t>(other)] = e.cluster_mass;
          continue;
        }
        double m = 0.0;
        for (const auto& p : intensity.of(ClassLabel{other})) {
          const double dx = p.state.kin[axis::kX] - e.kin[axis::kX];
          const double dy = p.state.kin[axis::kY] - e.kin[axis::kY];
          if (dx * dx + dy * dy <= gate * gate) m += p.weight;
        }
        e.class_masses[static_cast<std::size_t>(other)] = m;
      }
    }
  }
  return result;
}

}  // namespace jdtc
