#include "jdtc/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jdtc {

namespace {

constexpr std::uint64_t kMeasurementStream = 0x6d656173;

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(purpose >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

int ScenarioConfig::num_scans() const {
  return static_cast<int>(std::floor(duration_s / dt_s + 1e-9)) + 1;
}

void ScenarioConfig::validate() const {
  if (!(dt_s > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
  if (!(duration_s >= 0.0)) throw std::invalid_argument("scenario: duration must be >= 0");
  if (classes.empty()) throw std::invalid_argument("scenario: at least one class required");
  const auto c = static_cast<std::size_t>(num_classes());
  if (mode_transition.size() != c) throw std::invalid_argument("scenario: one mode transition per class required");
  if (birth.size() != c) throw std::invalid_argument("scenario: one birth entry per class required");
  if (!(survival_probability >= 0.0 && survival_probability <= 1.0)) {
    throw std::invalid_argument("scenario: survival probability outside [0, 1]");
  }
  if (spawn.rate > 0.0 &&
      (spawn.class_transition.rows() != num_classes() || spawn.class_transition.cols() != num_classes())) {
    throw std::invalid_argument("scenario: spawn class transition must be CxC");
  }
  if (sensors.empty()) throw std::invalid_argument("scenario: at least one sensor required");
  for (const auto& s : sensors) s.validate();
  for (const auto& cls : classes) (void)cls.band();
  for (const auto& t : targets) {
    if (t.label.index < 0 || t.label.index >= num_classes()) {
      throw std::invalid_argument("scenario: target " + std::to_string(t.id) + " references an unconfigured class");
    }
    // death past the end of the run just means the target outlives it
    if (!(t.birth_s >= 0.0 && t.birth_s < t.death_s)) {
      throw std::invalid_argument("scenario: target " + std::to_string(t.id) + " needs 0 <= birth < death");
    }
  }
}

TargetModels build_models(const ScenarioConfig& cfg) {
  cfg.validate();
  TargetModels m;
  std::vector<StochasticMatrix> mode;
  for (const auto& p : cfg.mode_transition) mode.emplace_back(Eigen::MatrixXd(p));
  m.motion = MotionModel(cfg.dt_s, cfg.motion_noise, std::move(mode));
  m.survival = SurvivalModel{cfg.survival_probability};
  m.birth = BirthModel(cfg.birth);
  if (cfg.spawn.rate > 0.0) {
    m.spawn = SpawnModel(cfg.spawn.rate, Matrix5(cfg.spawn.cov_diag.asDiagonal()),
                         StochasticMatrix(Eigen::MatrixXd(cfg.spawn.mode_transition)),
                         StochasticMatrix(cfg.spawn.class_transition));
  }
  return m;
}

std::vector<SensorModel> build_sensor_models(const ScenarioConfig& cfg) {
  std::vector<SnrBand> bands;
  for (const auto& c : cfg.classes) bands.push_back(c.band());
  std::vector<SensorModel> out;
  for (const auto& s : cfg.sensors) out.emplace_back(s, cfg.clutter, bands);
  return out;
}

std::vector<LabeledPoint> GroundTruth::positions(int scan) const {
  std::vector<LabeledPoint> out;
  for (const auto& r : scans.at(static_cast<std::size_t>(scan))) {
    out.push_back({r.label, Eigen::Vector2d(r.kin[axis::kX], r.kin[axis::kY])});
  }
  return out;
}

std::vector<int> GroundTruth::class_counts(int scan, int num_classes) const {
  std::vector<int> n(static_cast<std::size_t>(num_classes), 0);
  for (const auto& r : scans.at(static_cast<std::size_t>(scan))) ++n.at(static_cast<std::size_t>(r.label.index));
  return n;
}

GroundTruth generate_truth(const ScenarioConfig& cfg) {
  cfg.validate();
  GroundTruth truth;
  truth.dt_s = cfg.dt_s;
  const int num_scans = cfg.num_scans();
  truth.scans.resize(static_cast<std::size_t>(num_scans));
  constexpr double kTimeEps = 1e-9;

  for (const auto& target : cfg.targets) {
    KinematicState state = target.initial;
    bool alive = false;
    double age = 0.0;
    for (int k = 0; k < num_scans; ++k) {
      const double t = cfg.time_of(k);
      if (t + kTimeEps < target.birth_s) continue;
      if (t + kTimeEps >= target.death_s) break;
      if (alive) {
        // segment in force over (age - dT, age]
        double start = 0.0;
        TruthSegment seg;
        for (const auto& s : target.segments) {
          if (age - cfg.dt_s + kTimeEps < start + s.duration_s) {
            seg = s;
            break;
          }
          start += s.duration_s;
        }
        if (seg.mode == MotionMode::kCT) {
          state[axis::kOmega] = seg.turn_rate;
          state = ct_transition(state, cfg.dt_s);
        } else {
          state = cv_transition(state, cfg.dt_s);
        }
      }
      alive = true;
      truth.scans[static_cast<std::size_t>(k)].push_back({target.id, target.label, state});
      age += cfg.dt_s;
    }
  }
  return truth;
}

std::vector<ScanDetections> generate_measurements(const GroundTruth& truth, const ScenarioConfig& cfg,
                                                  std::uint64_t seed) {
  std::vector<SnrBand> bands;
  for (const auto& c : cfg.classes) bands.push_back(c.band());

  std::vector<ScanDetections> out(truth.scans.size());
  for (std::size_t k = 0; k < truth.scans.size(); ++k) {
    Rng rng = make_stream(seed, kMeasurementStream, k);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto& scan = out[k];
    scan.resize(cfg.sensors.size());
    for (std::size_t s = 0; s < cfg.sensors.size(); ++s) {
      const auto& sensor = cfg.sensors[s];
      for (const auto& rec : truth.scans[k]) {
        const double a = sample_target_amplitude(bands[static_cast<std::size_t>(rec.label.index)], rng);
        if (a < sensor.threshold) continue;
        Eigen::Vector2d clean;
        try {
          clean = observe(rec.kin, sensor);
        } catch (const std::domain_error&) {
          continue;  // target on top of the sensor: no usable polar measurement
        }
        Detection d;
        d.sensor_id = sensor.id;
        d.amplitude = a;
        if (sensor.kind == SensorKind::kCartesian) {
          d.z = clean + sensor.range_sigma * Eigen::Vector2d(normal(rng), normal(rng));
        } else {
          double r;
          do {
            r = clean[0] + sensor.range_sigma * normal(rng);
          } while (r < 0.0);
          d.z = {r, wrap_angle(clean[1] + sensor.bearing_sigma * normal(rng))};
        }
        scan[s].push_back(d);
      }
      auto clutter = sample_clutter(cfg.clutter, sensor, rng);
      scan[s].insert(scan[s].end(), clutter.begin(), clutter.end());
    }
  }
  return out;
}

}  // namespace jdtc
