#include "jdtc/sensing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace jdtc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double expint_e1(double x) {
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  return -std::expint(-x);
}

}  // namespace

void SensorConfig::validate() const {
  if (!(range_sigma > 0.0)) throw std::invalid_argument("sensor: range sigma must be > 0");
  if (kind == SensorKind::kPolar && !(bearing_sigma > 0.0)) {
    throw std::invalid_argument("sensor: bearing sigma must be > 0");
  }
  if (!(threshold >= 0.0)) throw std::invalid_argument("sensor: threshold must be >= 0");
}

SnrBand SnrBand::from_db(double low_db, double high_db) {
  SnrBand b{std::pow(10.0, low_db / 10.0), std::pow(10.0, high_db / 10.0)};
  b.validate();
  return b;
}

void SnrBand::validate() const {
  if (!std::isfinite(d1) || !std::isfinite(d2) || d1 < 0.0) {
    throw std::invalid_argument("SNR band must be finite with d1 >= 0");
  }
  if (!(d2 > d1)) {
    throw std::invalid_argument(
        "SNR band is degenerate (d2 <= d1); use the fixed-SNR Rayleigh density a/(1+d) exp(-a^2/(2(1+d)))");
  }
}

double ClutterModel::spatial_density(const SensorConfig& sensor) const {
  if (sensor.kind == SensorKind::kCartesian) return 1.0 / (std::numbers::pi * max_range * max_range);
  return 1.0 / (kTwoPi * max_range);
}

double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Eigen::Vector2d observe(const KinematicState& kin, const SensorConfig& sensor) {
  if (sensor.kind == SensorKind::kCartesian) return {kin[axis::kX], kin[axis::kY]};
  const double dx = kin[axis::kX] - sensor.position.x();
  const double dy = kin[axis::kY] - sensor.position.y();
  const double r = std::hypot(dx, dy);
  if (r == 0.0) throw std::domain_error("observe: target coincides with sensor position");
  return {r, std::atan2(dy, dx)};
}

Eigen::Vector2d predicted_measurement(const KinematicState& kin, const SensorConfig& sensor) {
  if (sensor.kind == SensorKind::kCartesian) return {kin[axis::kX], kin[axis::kY]};
  const double dx = kin[axis::kX] - sensor.position.x();
  const double dy = kin[axis::kY] - sensor.position.y();
  return {std::hypot(dx, dy), std::atan2(dy, dx)};
}

double log_measurement_density(const Eigen::Vector2d& z, const Eigen::Vector2d& predicted,
                               const SensorConfig& sensor) {
  if (sensor.kind == SensorKind::kCartesian) {
    const double s = sensor.range_sigma;
    const double ex = (z[0] - predicted[0]) / s;
    const double ey = (z[1] - predicted[1]) / s;
    return -std::log(kTwoPi * s * s) - 0.5 * (ex * ex + ey * ey);
  }
  const double er = (z[0] - predicted[0]) / sensor.range_sigma;
  const double eb = wrap_angle(z[1] - predicted[1]) / sensor.bearing_sigma;
  return -std::log(kTwoPi * sensor.range_sigma * sensor.bearing_sigma) - 0.5 * (er * er + eb * eb);
}

double log_kinematic_likelihood(const Detection& z, const KinematicState& kin, const SensorConfig& sensor) {
  return log_measurement_density(z.z, predicted_measurement(kin, sensor), sensor);
}

double kinematic_likelihood(const Detection& z, const KinematicState& kin, const SensorConfig& sensor) {
  return std::exp(log_kinematic_likelihood(z, kin, sensor));
}

// ---- Amplitudes ----

double clutter_amp_pdf(double a) {
  if (a < 0.0) throw std::domain_error("clutter_amp_pdf: negative amplitude");
  return a * std::exp(-0.5 * a * a);
}

double log_clutter_amp_pdf(double a) {
  if (a < 0.0) throw std::domain_error("log_clutter_amp_pdf: negative amplitude");
  return std::log(a) - 0.5 * a * a;
}

double log_target_amp_pdf(double a, const SnrBand& band) {
  band.validate();
  if (a < 0.0) throw std::domain_error("target_amp_pdf: negative amplitude");
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  const double s1 = 1.0 + band.d1;
  const double s2 = 1.0 + band.d2;
  const double half_sq = 0.5 * a * a;
  const double log_ratio = std::log1p((s2 - s1) / s1);
  // exp(-A/s2) - exp(-A/s1) = exp(-A/s2) * (1 - exp(-(A/s1 - A/s2)))
  const double gap = half_sq / s1 - half_sq / s2;
  return std::log(2.0) - half_sq / s2 + std::log(-std::expm1(-gap)) - std::log(a) - std::log(log_ratio);
}

double target_amp_pdf(double a, const SnrBand& band) {
  return std::exp(log_target_amp_pdf(a, band));
}

double p_fa(double tau) {
  if (tau < 0.0) throw std::domain_error("p_fa: negative threshold");
  return std::exp(-0.5 * tau * tau);
}

double p_d(double tau, const SnrBand& band) {
  band.validate();
  if (tau < 0.0) throw std::domain_error("p_d: negative threshold");
  if (tau == 0.0) return 1.0;
  if (std::isinf(tau)) return 0.0;
  const double s1 = 1.0 + band.d1;
  const double s2 = 1.0 + band.d2;
  const double log_ratio = std::log1p((s2 - s1) / s1);
  const double half_sq = 0.5 * tau * tau;
  if (log_ratio < 1e-2) {
    // The E1 difference cancels for narrow bands. Since d E1(h / s) / d ln s
    // = exp(-h / s), integrate that over ln s with 5-point Gauss-Legendre.
    static constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                         0.9061798459386640};
    static constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};
    const double mid = std::log(s1) + 0.5 * log_ratio;
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += kWeights[i] * std::exp(-half_sq * std::exp(-(mid + 0.5 * log_ratio * kNodes[i])));
    return 0.5 * sum;
  }
  return (expint_e1(half_sq / s2) - expint_e1(half_sq / s1)) / log_ratio;
}

double p_miss(double tau, const SnrBand& band) {
  band.validate();
  if (tau < 0.0) throw std::domain_error("p_miss: negative threshold");
  if (tau == 0.0) return 0.0;
  if (std::isinf(tau)) return 1.0;
  const double s1 = 1.0 + band.d1;
  const double s2 = 1.0 + band.d2;
  const double log_ratio = std::log1p((s2 - s1) / s1);
  const double half_sq = 0.5 * tau * tau;
  if (log_ratio < 1e-2) {
    static constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                         0.9061798459386640};
    static constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};
    const double mid = std::log(s1) + 0.5 * log_ratio;
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      sum -= kWeights[i] * std::expm1(-half_sq * std::exp(-(mid + 0.5 * log_ratio * kNodes[i])));
    }
    return 0.5 * sum;
  }
  const double x = half_sq / s1;
  if (x >= 1.0) return 1.0 - p_d(tau, band);
  // small threshold: 1 - p_d cancels, sum the power series of the E1 difference
  double sum = 0.0;
  double power = 1.0;  // x^n / n!
  for (int n = 1; n <= 40; ++n) {
    power *= x / n;
    const double term = power * -std::expm1(-n * log_ratio) / n;
    sum += (n % 2 == 1) ? term : -term;
    if (term < 1e-18 * sum) break;
  }
  return sum / log_ratio;
}

AmplitudeDensities amp_likelihoods_thresholded(double a, double tau, const SnrBand& band) {
  if (a < tau) throw std::invalid_argument("amp_likelihoods_thresholded: amplitude below threshold");
  return {clutter_amp_pdf(a) / p_fa(tau), target_amp_pdf(a, band) / p_d(tau, band)};
}

double sample_clutter_amplitude(double tau, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = 1.0 - uni(rng);  // (0, 1]
  return std::sqrt(tau * tau - 2.0 * std::log(u));
}

double sample_target_amplitude(const SnrBand& band, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double log_s = std::log1p(band.d1) + uni(rng) * (std::log1p(band.d2) - std::log1p(band.d1));
  const double power = std::exp(log_s);
  const double u = 1.0 - uni(rng);
  return std::sqrt(-2.0 * power * std::log(u));
}

std::vector<Detection> sample_clutter(const ClutterModel& model, const SensorConfig& sensor, Rng& rng) {
  std::vector<Detection> out;
  if (model.rate <= 0.0) return out;
  std::poisson_distribution<int> count(model.rate);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n = count(rng);
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Detection d;
    d.sensor_id = sensor.id;
    if (sensor.kind == SensorKind::kCartesian) {
      const double r = model.max_range * std::sqrt(uni(rng));
      const double th = kTwoPi * uni(rng);
      d.z = sensor.position + Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
    } else {
      d.z[0] = model.max_range * uni(rng);
      d.z[1] = wrap_angle(kTwoPi * uni(rng) - std::numbers::pi);
    }
    d.amplitude = sample_clutter_amplitude(sensor.threshold, rng);
    out.push_back(d);
  }
  return out;
}

}  // namespace jdtc
