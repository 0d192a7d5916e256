#pragma once

#include "jdtc/gating.hpp"
#include "jdtc/particles.hpp"
#include "jdtc/resampling.hpp"
#include "jdtc/state_space.hpp"

#include <deque>

namespace jdtc {

struct SmootherConfig {
  int lag = 3;
  GatingConfig gating;
};

/// One backward step: reweights the filtered particles at t given the smoothed
/// particles at t+1. Per class c and particle s,
///
///   w_{t|k}(s) = w_{t|t}(s) [ P_s(s) sum_q w_{t+1|k}(q) f(q | s) pi(r_s -> r_q) / mu(q) + 1 - P_s(s) ]
///
///   mu(q) = gamma_c(q) + sum_u w_{t|t}(u) pi(r_u -> r_q) P_s(u) f(q | u)
///         + sum_{c''} sum_u w_{t|t}(u) beta(q | u)
///
/// with u running over class c in the survival term and over every source
/// class in the spawn term. Particle states are unchanged.
ParticleIntensity smooth_step(const ParticleIntensity& filtered, const ParticleIntensity& smoothed_next,
                              const TargetModels& models, const GatingConfig& gate);

/// Last lag + 1 filtered intensities, oldest first.
class SmootherWindow {
 public:
  explicit SmootherWindow(int lag);

  void push(ParticleIntensity filtered);

  [[nodiscard]] int lag() const { return lag_; }
  [[nodiscard]] bool full() const { return static_cast<int>(buffer_.size()) == lag_ + 1; }
  [[nodiscard]] const std::deque<ParticleIntensity>& contents() const { return buffer_; }

 private:
  int lag_;
  std::deque<ParticleIntensity> buffer_;
};

/// Backward pass from the newest entry down to the oldest; returns the
/// smoothed intensity at scan k - L.
ParticleIntensity smooth_window(const SmootherWindow& window, const TargetModels& models, const GatingConfig& gate);

/// Per-class resampling after smoothing; same contract as the filter's resample.
ParticleIntensity resample_smoothed(const ParticleIntensity& smoothed, const ResampleConfig& config, Rng& rng);

}  // namespace jdtc
