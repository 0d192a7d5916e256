#pragma once

#include "jdtc/particles.hpp"

#include <span>
#include <vector>

namespace jdtc {

/// Low-variance (systematic) resampling: `count` indices into `weights`, one
/// uniform offset and evenly spaced pointers. Weights need not be normalised.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, Rng& rng);

/// Effective sample size of the normalised weights, (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const Particle> particles);

struct ResampleConfig {
  int particles_per_target = 500;
  int particles_per_birth = 500;
  /// Classes whose mass exceeds this keep at least particles_per_birth particles.
  double mass_floor = 0.1;
  /// Resample a class when ESS / N falls below this fraction; >= 1 always resamples.
  double ess_threshold = 1.0;
};

/// Number of particles a class of mass `mass` is resampled to.
std::size_t resample_count(double mass, const ResampleConfig& config);

/// Per-class systematic resampling. Each class keeps its mass exactly and
/// ends with equal weights mass / count. Zero-mass classes are emptied.
ParticleIntensity resample(const ParticleIntensity& in, const ResampleConfig& config, Rng& rng);

}  // namespace jdtc
