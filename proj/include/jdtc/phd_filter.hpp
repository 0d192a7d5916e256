#pragma once

#include "jdtc/particles.hpp"
#include "jdtc/resampling.hpp"
#include "jdtc/sensing.hpp"
#include "jdtc/state_space.hpp"

#include <vector>

namespace jdtc {

struct FilterConfig {
  ResampleConfig resampling;
  int spawn_particles_per_parent = 2;
  /// Sensor ids in update order; empty means configuration order.
  std::vector<int> sensor_order;
};

/// One sensor together with its clutter law and per-class SNR bands, with the
/// class detection probabilities precomputed.
class SensorModel {
 public:
  SensorModel() = default;
  SensorModel(SensorConfig sensor, ClutterModel clutter, std::vector<SnrBand> bands);

  [[nodiscard]] const SensorConfig& sensor() const { return sensor_; }
  [[nodiscard]] const ClutterModel& clutter() const { return clutter_; }
  [[nodiscard]] const SnrBand& band(ClassLabel c) const { return bands_.at(static_cast<std::size_t>(c.index)); }

  /// p_D(x, c). Depends on the class only, through tau and the SNR band.
  [[nodiscard]] double detection_probability(const AugmentedState& state) const {
    return pd_[static_cast<std::size_t>(state.label.index)];
  }
  [[nodiscard]] double miss_probability(const AugmentedState& state) const {
    return miss_[static_cast<std::size_t>(state.label.index)];
  }
  /// log kappa(z) = log(lambda_c * u(z_x) * g0^tau(a)); -inf without clutter.
  [[nodiscard]] double log_clutter_intensity(const Detection& z) const;
  /// log h(a | c) = log g_a^tau(a | band_c).
  [[nodiscard]] double log_feature_likelihood(const Detection& z, ClassLabel c) const;

 private:
  SensorConfig sensor_;
  ClutterModel clutter_;
  std::vector<SnrBand> bands_;
  std::vector<double> pd_;
  std::vector<double> miss_;
};

/// Survivors (w * P_s, moved by sample_motion), spawn children and births.
ParticleIntensity predict(const ParticleIntensity& prior, const TargetModels& models,
                          const FilterConfig& config, Rng& rng);

/// Per-detection diagnostics of one single-sensor update.
struct UpdateTrace {
  std::vector<double> log_clutter;  // log kappa(z_j)
  std::vector<double> log_psi;      // log Psi(z_j)
  std::vector<double> contribution;  // posterior mass attributed to z_j
};

/// w <- w [(1 - p_D) + sum_j p_D g(z_j | x) h(a_j | c) / (kappa(z_j) + Psi(z_j))],
/// evaluated in log space with a per-detection max shift.
ParticleIntensity update_single_sensor(const ParticleIntensity& predicted, const std::vector<Detection>& detections,
                                       const SensorModel& sensor, UpdateTrace* trace = nullptr);

/// Iterated corrector: single-sensor updates in `order` (indices into
/// `sensors` and `scan`).
ParticleIntensity update(const ParticleIntensity& predicted, const std::vector<std::vector<Detection>>& scan,
                         const std::vector<SensorModel>& sensors, const std::vector<int>& order);

/// Indices into `sensors` for the configured sensor-id order.
std::vector<int> resolve_sensor_order(const std::vector<SensorModel>& sensors, const std::vector<int>& sensor_ids);

}  // namespace jdtc
