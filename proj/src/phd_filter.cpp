#include "jdtc/phd_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace jdtc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

SensorModel::SensorModel(SensorConfig sensor, ClutterModel clutter, std::vector<SnrBand> bands)
    : sensor_(std::move(sensor)), clutter_(clutter), bands_(std::move(bands)) {
  sensor_.validate();
  if (clutter_.rate < 0.0) throw std::invalid_argument("clutter rate must be >= 0");
  for (const auto& b : bands_) {
    pd_.push_back(p_d(sensor_.threshold, b));
    miss_.push_back(p_miss(sensor_.threshold, b));
  }
}

double SensorModel::log_clutter_intensity(const Detection& z) const {
  if (clutter_.rate == 0.0) return kNegInf;
  const double tau = sensor_.threshold;
  return std::log(clutter_.rate) + std::log(clutter_.spatial_density(sensor_)) + log_clutter_amp_pdf(z.amplitude) +
         0.5 * tau * tau;
}

double SensorModel::log_feature_likelihood(const Detection& z, ClassLabel c) const {
  const double pd = pd_.at(static_cast<std::size_t>(c.index));
  if (pd == 0.0) return kNegInf;
  return log_target_amp_pdf(z.amplitude, band(c)) - std::log(pd);
}

ParticleIntensity predict(const ParticleIntensity& prior, const TargetModels& models, const FilterConfig& config,
                          Rng& rng) {
  const int num_classes = models.num_classes();
  if (prior.num_classes() != num_classes) throw std::invalid_argument("predict: class count mismatch");
  ParticleIntensity out(num_classes, prior.scan + 1);

  for (int c = 0; c < num_classes; ++c) {
    const auto& src = prior.of(ClassLabel{c});
    auto& dst = out.of(ClassLabel{c});
    dst.reserve(src.size() + static_cast<std::size_t>(config.resampling.particles_per_birth) * 4);
    for (const auto& p : src) {
      dst.push_back(Particle{p.weight * models.survival(p.state), sample_motion(p.state, models.motion, rng)});
    }
  }

  if (models.spawn.lambda > 0.0) {
    for (int c = 0; c < num_classes; ++c) {
      for (const auto& parent : prior.of(ClassLabel{c})) {
        for (auto& child : sample_spawn(models.spawn, parent, config.spawn_particles_per_parent, rng)) {
          out.of(child.state.label).push_back(std::move(child));
        }
      }
    }
  }

  for (int c = 0; c < num_classes; ++c) {
    if (models.birth.components(ClassLabel{c}).empty()) continue;
    auto born = sample_birth(models.birth, ClassLabel{c}, config.resampling.particles_per_birth, rng);
    auto& dst = out.of(ClassLabel{c});
    dst.insert(dst.end(), born.begin(), born.end());
  }
  return out;
}

ParticleIntensity update_single_sensor(const ParticleIntensity& predicted, const std::vector<Detection>& detections,
                                       const SensorModel& sensor, UpdateTrace* trace) {
  const std::size_t num_det = detections.size();
  const std::size_t num_particles = predicted.size();
  const auto& cfg = sensor.sensor();

  for (const auto& z : detections) {
    if (z.amplitude < cfg.threshold) {
      throw std::invalid_argument("update: detection amplitude below the sensor threshold");
    }
  }

  // log(p_D g h) per particle (rows) and detection (columns), flattened over classes.
  std::vector<double> loglik(num_particles * num_det);
  std::vector<double> log_w(num_particles);
  std::vector<double> log_feature(num_det);
  std::vector<double> log_clutter(num_det);
  for (std::size_t j = 0; j < num_det; ++j) log_clutter[j] = sensor.log_clutter_intensity(detections[j]);

  std::size_t i = 0;
  for (int c = 0; c < predicted.num_classes(); ++c) {
    const ClassLabel label{c};
    const auto& particles = predicted.of(label);
    if (particles.empty()) continue;
    const double pd = sensor.detection_probability(particles.front().state);
    const double log_pd = pd > 0.0 ? std::log(pd) : kNegInf;
    for (std::size_t j = 0; j < num_det; ++j) log_feature[j] = sensor.log_feature_likelihood(detections[j], label);
    for (const auto& p : particles) {
      log_w[i] = p.weight > 0.0 ? std::log(p.weight) : kNegInf;
      const Eigen::Vector2d zhat = predicted_measurement(p.state.kin, cfg);
      double* row = &loglik[i * num_det];
      for (std::size_t j = 0; j < num_det; ++j) {
        const double v =
            log_pd == kNegInf ? kNegInf : log_pd + log_measurement_density(detections[j].z, zhat, cfg) + log_feature[j];
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
          std::ostringstream msg;
          msg << "update: non-finite likelihood for particle " << i << " (class " << c + 1 << ") and detection " << j;
          throw std::runtime_error(msg.str());
        }
        row[j] = v;
      }
      ++i;
    }
  }

  // log(kappa + Psi) per detection.
  std::vector<double> log_denom(num_det);
  std::vector<double> log_psi(num_det);
  for (std::size_t j = 0; j < num_det; ++j) {
    double m = kNegInf;
    for (std::size_t p = 0; p < num_particles; ++p) m = std::max(m, log_w[p] + loglik[p * num_det + j]);
    double lp = kNegInf;
    if (m != kNegInf) {
      double s = 0.0;
      for (std::size_t p = 0; p < num_particles; ++p) s += std::exp(log_w[p] + loglik[p * num_det + j] - m);
      lp = m + std::log(s);
    }
    log_psi[j] = lp;
    log_denom[j] = log_add_exp(log_clutter[j], lp);
  }

  ParticleIntensity out(predicted.num_classes(), predicted.scan);
  std::vector<double> contribution(num_det, 0.0);
  i = 0;
  for (int c = 0; c < predicted.num_classes(); ++c) {
    const auto& particles = predicted.of(ClassLabel{c});
    auto& dst = out.of(ClassLabel{c});
    dst.reserve(particles.size());
    for (const auto& p : particles) {
      double bracket = sensor.miss_probability(p.state);
      const double* row = &loglik[i * num_det];
      for (std::size_t j = 0; j < num_det; ++j) {
        if (log_denom[j] == kNegInf || row[j] == kNegInf) continue;
        const double term = std::exp(row[j] - log_denom[j]);
        bracket += term;
        contribution[j] += p.weight * term;
      }
      dst.push_back(Particle{p.weight * bracket, p.state});
      ++i;
    }
  }

  if (trace != nullptr) {
    trace->log_clutter = std::move(log_clutter);
    trace->log_psi = std::move(log_psi);
    trace->contribution = std::move(contribution);
  }
  return out;
}

ParticleIntensity update(const ParticleIntensity& predicted, const std::vector<std::vector<Detection>>& scan,
                         const std::vector<SensorModel>& sensors, const std::vector<int>& order) {
  if (scan.size() != sensors.size()) throw std::invalid_argument("update: one detection list per sensor required");
  ParticleIntensity current = predicted;
  for (int s : order) {
    const auto idx = static_cast<std::size_t>(s);
    current = update_single_sensor(current, scan.at(idx), sensors.at(idx));
  }
  return current;
}

std::vector<int> resolve_sensor_order(const std::vector<SensorModel>& sensors, const std::vector<int>& sensor_ids) {
  std::vector<int> order;
  if (sensor_ids.empty()) {
    for (int s = 0; s < static_cast<int>(sensors.size()); ++s) order.push_back(s);
    return order;
  }
  for (int id : sensor_ids) {
    auto it = std::find_if(sensors.begin(), sensors.end(), [id](const SensorModel& m) { return m.sensor().id == id; });
    if (it == sensors.end()) throw std::invalid_argument("sensor order names unknown sensor id " + std::to_string(id));
    order.push_back(static_cast<int>(it - sensors.begin()));
  }
  return order;
}

}  // namespace jdtc
