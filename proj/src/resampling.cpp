#include "jdtc/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jdtc {

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx;
  if (count == 0 || weights.empty()) return idx;
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("systematic_resample: weights sum to zero");

  idx.reserve(count);
  const double step = total / static_cast<double>(count);
  std::uniform_real_distribution<double> uni(0.0, step);
  double pointer = uni(rng);
  double cumulative = weights[0];
  std::size_t i = 0;
  for (std::size_t j = 0; j < count; ++j, pointer += step) {
    while (pointer >= cumulative && i + 1 < weights.size()) cumulative += weights[++i];
    idx.push_back(i);
  }
  return idx;
}

double effective_sample_size(std::span<const Particle> particles) {
  double s = 0.0;
  double s2 = 0.0;
  for (const auto& p : particles) {
    s += p.weight;
    s2 += p.weight * p.weight;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

std::size_t resample_count(double mass, const ResampleConfig& config) {
  if (!(mass > 0.0)) return 0;
  auto n = static_cast<std::size_t>(std::llround(config.particles_per_target * mass));
  n = std::max<std::size_t>(n, 1);
  if (mass > config.mass_floor) n = std::max(n, static_cast<std::size_t>(config.particles_per_birth));
  return n;
}

ParticleIntensity resample(const ParticleIntensity& in, const ResampleConfig& config, Rng& rng) {
  if (config.particles_per_target <= 0 || config.particles_per_birth <= 0) {
    throw std::invalid_argument("resample: particle counts must be > 0");
  }
  ParticleIntensity out(in.num_classes(), in.scan);
  std::vector<double> weights;
  for (int c = 0; c < in.num_classes(); ++c) {
    const auto& src = in.of(ClassLabel{c});
    auto& dst = out.of(ClassLabel{c});
    const double mass = in.mass(ClassLabel{c});
    if (!(mass > 0.0)) continue;

    if (config.ess_threshold < 1.0 &&
        effective_sample_size(src) >= config.ess_threshold * static_cast<double>(src.size())) {
      dst = src;
      continue;
    }

    const std::size_t n = resample_count(mass, config);
    weights.resize(src.size());
    std::transform(src.begin(), src.end(), weights.begin(), [](const Particle& p) { return p.weight; });
    const double w = mass / static_cast<double>(n);
    dst.reserve(n);
    for (std::size_t i : systematic_resample(weights, n, rng)) {
      dst.push_back(Particle{w, src[i].state});
    }
  }
  return out;
}

}  // namespace jdtc
