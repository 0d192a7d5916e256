#include "jdtc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <fstream>
#include <sstream>

namespace jdtc {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!node.IsMap()) return;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& where) {
  if (!node.IsMap() || !node[key]) fail(where, "missing key '" + key + "'");
  return node[key];
}

template <typename T>
T as(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    fail(where, std::string("bad value (") + e.what() + ")");
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
  return as<T>(require(node, key, where), where + "." + key);
}

template <typename T>
T get_or(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
  if (!node.IsMap() || !node[key]) return fallback;
  return as<T>(node[key], where + "." + key);
}

std::vector<double> get_vector(const YAML::Node& node, std::size_t n, const std::string& where) {
  if (!node.IsSequence() || node.size() != n) fail(where, "expected a list of " + std::to_string(n) + " numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(as<double>(node[i], where));
  return v;
}

Eigen::MatrixXd get_matrix(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() == 0) fail(where, "expected a non-empty list of rows");
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].IsSequence() ? node[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = get_vector(node[r], cols, where);
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

Vector5 get_vector5(const YAML::Node& node, const std::string& where) {
  auto v = get_vector(node, 5, where);
  return Eigen::Map<Vector5>(v.data());
}

Eigen::Matrix2d get_matrix2(const YAML::Node& node, const std::string& where) {
  auto m = get_matrix(node, where);
  if (m.rows() != 2 || m.cols() != 2) fail(where, "expected a 2x2 matrix");
  return m;
}

Matrix5 get_cov5(const YAML::Node& node, const std::string& where) {
  if (node["cov_diag"]) return Matrix5(get_vector5(node["cov_diag"], where + ".cov_diag").asDiagonal());
  auto m = get_matrix(require(node, "cov", where), where + ".cov");
  if (m.rows() != 5 || m.cols() != 5) fail(where + ".cov", "expected a 5x5 matrix");
  return m;
}

ClassLabel get_class(const YAML::Node& node, int num_classes, const std::string& where) {
  const int one_based = get<int>(node, "class", where);
  if (one_based < 1 || one_based > num_classes) {
    fail(where + ".class", "class " + std::to_string(one_based) + " is not configured");
  }
  return ClassLabel{one_based - 1};
}

MotionMode parse_mode(const std::string& s, const std::string& where) {
  if (s == "cv" || s == "CV") return MotionMode::kCV;
  if (s == "ct" || s == "CT") return MotionMode::kCT;
  fail(where, "unknown motion mode '" + s + "' (expected cv or ct)");
}

SensorKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "polar") return SensorKind::kPolar;
  if (s == "cartesian") return SensorKind::kCartesian;
  fail(where, "unknown sensor kind '" + s + "' (expected polar or cartesian)");
}

void parse_scenario(const YAML::Node& root, ScenarioConfig& sc) {
  const auto scen = require(root, "scenario", "root");
  check_keys(scen, {"dt_s", "duration_s", "seed"}, "scenario");
  sc.dt_s = get<double>(scen, "dt_s", "scenario");
  sc.duration_s = get<double>(scen, "duration_s", "scenario");
  sc.seed = get_or<std::uint64_t>(scen, "seed", 1, "scenario");

  const auto classes = require(root, "classes", "root");
  if (!classes.IsSequence() || classes.size() == 0) fail("classes", "expected a non-empty list");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string where = "classes[" + std::to_string(i) + "]";
    ClassSpec c;
    check_keys(classes[i], {"name", "snr_band_db"}, where);
    c.name = get_or<std::string>(classes[i], "name", "class" + std::to_string(i + 1), where);
    auto band = get_vector(require(classes[i], "snr_band_db", where), 2, where + ".snr_band_db");
    c.snr_low_db = band[0];
    c.snr_high_db = band[1];
    sc.classes.push_back(c);
  }
  const int nc = sc.num_classes();

  const auto motion = require(root, "motion", "root");
  check_keys(motion, {"cv_l", "ct_l1", "ct_l2", "mode_transition"}, "motion");
  sc.motion_noise.cv_l = get<double>(motion, "cv_l", "motion");
  sc.motion_noise.ct_l1 = get<double>(motion, "ct_l1", "motion");
  sc.motion_noise.ct_l2 = get<double>(motion, "ct_l2", "motion");
  const auto mt = require(motion, "mode_transition", "motion");
  if (mt.IsSequence() && mt.size() > 0 && mt[0].IsSequence() && mt[0].size() > 0 && mt[0][0].IsSequence()) {
    if (static_cast<int>(mt.size()) != nc) fail("motion.mode_transition", "expected one matrix per class");
    for (std::size_t i = 0; i < mt.size(); ++i) {
      sc.mode_transition.push_back(get_matrix2(mt[i], "motion.mode_transition[" + std::to_string(i) + "]"));
    }
  } else {
    sc.mode_transition.assign(static_cast<std::size_t>(nc), get_matrix2(mt, "motion.mode_transition"));
  }

  sc.survival_probability = get<double>(root, "survival_probability", "root");

  sc.birth.assign(static_cast<std::size_t>(nc), {});
  const auto birth = require(root, "birth", "root");
  if (!birth.IsSequence()) fail("birth", "expected a list");
  for (std::size_t i = 0; i < birth.size(); ++i) {
    const std::string where = "birth[" + std::to_string(i) + "]";
    check_keys(birth[i], {"class", "components"}, where);
    const ClassLabel c = get_class(birth[i], nc, where);
    const auto comps = require(birth[i], "components", where);
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const std::string cw = where + ".components[" + std::to_string(j) + "]";
      GaussianComponent g;
      check_keys(comps[j], {"weight", "mean", "cov_diag", "cov"}, cw);
      g.weight = get<double>(comps[j], "weight", cw);
      g.mean = get_vector5(require(comps[j], "mean", cw), cw + ".mean");
      g.cov = get_cov5(comps[j], cw);
      sc.birth[static_cast<std::size_t>(c.index)].push_back(g);
    }
  }

  if (const auto spawn = root["spawn"]) {
    check_keys(spawn, {"rate", "cov_diag", "mode_transition", "class_transition"}, "spawn");
    sc.spawn.rate = get<double>(spawn, "rate", "spawn");
    if (sc.spawn.rate > 0.0) {
      sc.spawn.cov_diag = get_vector5(require(spawn, "cov_diag", "spawn"), "spawn.cov_diag");
      sc.spawn.mode_transition = get_matrix2(require(spawn, "mode_transition", "spawn"), "spawn.mode_transition");
      sc.spawn.class_transition = get_matrix(require(spawn, "class_transition", "spawn"), "spawn.class_transition");
    }
  }

  const auto sensors = require(root, "sensors", "root");
  if (!sensors.IsSequence() || sensors.size() == 0) fail("sensors", "expected a non-empty list");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string where = "sensors[" + std::to_string(i) + "]";
    SensorConfig s;
    check_keys(sensors[i], {"id", "kind", "position", "range_sigma", "bearing_sigma", "threshold"}, where);
    s.id = get<int>(sensors[i], "id", where);
    auto p = get_vector(require(sensors[i], "position", where), 2, where + ".position");
    s.position = {p[0], p[1]};
    s.range_sigma = get<double>(sensors[i], "range_sigma", where);
    s.bearing_sigma = get_or<double>(sensors[i], "bearing_sigma", s.bearing_sigma, where);
    s.threshold = get<double>(sensors[i], "threshold", where);
    s.kind = parse_kind(get_or<std::string>(sensors[i], "kind", "polar", where), where + ".kind");
    sc.sensors.push_back(s);
  }

  const auto clutter = require(root, "clutter", "root");
  check_keys(clutter, {"rate", "max_range"}, "clutter");
  sc.clutter.rate = get<double>(clutter, "rate", "clutter");
  sc.clutter.max_range = get<double>(clutter, "max_range", "clutter");

  const auto targets = require(root, "targets", "root");
  if (!targets.IsSequence()) fail("targets", "expected a list");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "targets[" + std::to_string(i) + "]";
    TargetSpec t;
    check_keys(targets[i], {"id", "class", "birth_s", "death_s", "initial", "segments"}, where);
    t.id = get<int>(targets[i], "id", where);
    t.label = get_class(targets[i], nc, where);
    t.birth_s = get<double>(targets[i], "birth_s", where);
    t.death_s = get<double>(targets[i], "death_s", where);
    t.initial = get_vector5(require(targets[i], "initial", where), where + ".initial");
    if (const auto segs = targets[i]["segments"]) {
      for (std::size_t j = 0; j < segs.size(); ++j) {
        const std::string sw = where + ".segments[" + std::to_string(j) + "]";
        TruthSegment s;
        check_keys(segs[j], {"duration_s", "mode", "turn_rate"}, sw);
        s.duration_s = get<double>(segs[j], "duration_s", sw);
        s.mode = parse_mode(get<std::string>(segs[j], "mode", sw), sw + ".mode");
        s.turn_rate = get_or<double>(segs[j], "turn_rate", 0.0, sw);
        t.segments.push_back(s);
      }
    }
    sc.targets.push_back(t);
  }
}

void emit_vector(YAML::Emitter& out, const Eigen::VectorXd& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i];
  out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& out, const Eigen::MatrixXd& m) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index r = 0; r < m.rows(); ++r) emit_vector(out, m.row(r).transpose());
  out << YAML::EndSeq;
}

bool is_diagonal(const Matrix5& m) { return (m - Matrix5(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
    ospa.validate();
    (void)build_models(scenario);
    (void)build_sensor_models(scenario);
    (void)resolve_sensor_order(build_sensor_models(scenario), filter.sensor_order);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto& r = filter.resampling;
  if (r.particles_per_target < 1 || r.particles_per_birth < 1) {
    throw ConfigError("filter: particle counts must be >= 1");
  }
  if (filter.spawn_particles_per_parent < 0) throw ConfigError("filter: spawn_particles_per_parent must be >= 0");
  if (smoother.lag < 0) throw ConfigError("smoother: lag must be >= 0");
  if (!(smoother.gating.radius > 0.0)) throw ConfigError("smoother: gating radius must be > 0");
  if (window_first < 0 || window_last < window_first) throw ConfigError("evaluation: bad scan window");
}

ExperimentConfig parse_config(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML syntax: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("root: expected a mapping");

  check_keys(root, {"scenario", "classes", "motion", "survival_probability", "birth", "spawn", "sensors", "clutter",
                   "targets", "filter", "smoother", "extraction", "ospa", "evaluation"},
             "root");
  ExperimentConfig cfg;
  parse_scenario(root, cfg.scenario);

  if (const auto f = root["filter"]) {
    check_keys(f, {"particles_per_target", "particles_per_birth", "spawn_particles_per_parent", "resample_mass_floor",
                   "resample_ess_threshold", "sensor_order"},
               "filter");
    auto& r = cfg.filter.resampling;
    r.particles_per_target = get_or(f, "particles_per_target", r.particles_per_target, "filter");
    r.particles_per_birth = get_or(f, "particles_per_birth", r.particles_per_birth, "filter");
    r.mass_floor = get_or(f, "resample_mass_floor", r.mass_floor, "filter");
    r.ess_threshold = get_or(f, "resample_ess_threshold", r.ess_threshold, "filter");
    cfg.filter.spawn_particles_per_parent =
        get_or(f, "spawn_particles_per_parent", cfg.filter.spawn_particles_per_parent, "filter");
    if (f["sensor_order"]) cfg.filter.sensor_order = as<std::vector<int>>(f["sensor_order"], "filter.sensor_order");
  }
  if (const auto s = root["smoother"]) {
    check_keys(s, {"enabled", "lag", "gating"}, "smoother");
    cfg.smoother_enabled = get_or(s, "enabled", true, "smoother");
    cfg.smoother.lag = get_or(s, "lag", cfg.smoother.lag, "smoother");
    if (const auto g = s["gating"]) {
      check_keys(g, {"enabled", "radius"}, "smoother.gating");
      cfg.smoother.gating.enabled = get_or(g, "enabled", true, "smoother.gating");
      cfg.smoother.gating.radius = get_or(g, "radius", cfg.smoother.gating.radius, "smoother.gating");
    }
  }
  if (const auto e = root["extraction"]) {
    check_keys(e, {"max_iterations", "tolerance", "class_gate"}, "extraction");
    cfg.extraction.max_iterations = get_or(e, "max_iterations", cfg.extraction.max_iterations, "extraction");
    cfg.extraction.tolerance = get_or(e, "tolerance", cfg.extraction.tolerance, "extraction");
    cfg.extraction.class_gate = get_or(e, "class_gate", cfg.extraction.class_gate, "extraction");
  }
  if (const auto o = root["ospa"]) {
    check_keys(o, {"cutoff", "order"}, "ospa");
    cfg.ospa.cutoff = get_or(o, "cutoff", cfg.ospa.cutoff, "ospa");
    cfg.ospa.order = get_or(o, "order", cfg.ospa.order, "ospa");
  }
  if (const auto ev = root["evaluation"]) {
    check_keys(ev, {"window"}, "evaluation");
    if (ev["window"]) {
      auto w = get_vector(ev["window"], 2, "evaluation.window");
      cfg.window_first = static_cast<int>(w[0]);
      cfg.window_last = static_cast<int>(w[1]);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string emit_config(const ExperimentConfig& cfg) {
  const auto& sc = cfg.scenario;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt_s" << YAML::Value << sc.dt_s;
  out << YAML::Key << "duration_s" << YAML::Value << sc.duration_s;
  out << YAML::Key << "seed" << YAML::Value << sc.seed;
  out << YAML::EndMap;

  out << YAML::Key << "classes" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : sc.classes) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "snr_band_db" << YAML::Value;
    emit_vector(out, Eigen::Vector2d(c.snr_low_db, c.snr_high_db));
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "motion" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cv_l" << YAML::Value << sc.motion_noise.cv_l;
  out << YAML::Key << "ct_l1" << YAML::Value << sc.motion_noise.ct_l1;
  out << YAML::Key << "ct_l2" << YAML::Value << sc.motion_noise.ct_l2;
  out << YAML::Key << "mode_transition" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : sc.mode_transition) emit_matrix(out, m);
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "survival_probability" << YAML::Value << sc.survival_probability;

  out << YAML::Key << "birth" << YAML::Value << YAML::BeginSeq;
  for (std::size_t c = 0; c < sc.birth.size(); ++c) {
    out << YAML::BeginMap << YAML::Key << "class" << YAML::Value << static_cast<int>(c + 1);
    out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
    for (const auto& g : sc.birth[c]) {
      out << YAML::BeginMap << YAML::Key << "weight" << YAML::Value << g.weight;
      out << YAML::Key << "mean" << YAML::Value;
      emit_vector(out, g.mean);
      if (is_diagonal(g.cov)) {
        out << YAML::Key << "cov_diag" << YAML::Value;
        emit_vector(out, g.cov.diagonal());
      } else {
        out << YAML::Key << "cov" << YAML::Value;
        emit_matrix(out, g.cov);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "spawn" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rate" << YAML::Value << sc.spawn.rate;
  if (sc.spawn.rate > 0.0) {
    out << YAML::Key << "cov_diag" << YAML::Value;
    emit_vector(out, sc.spawn.cov_diag);
    out << YAML::Key << "mode_transition" << YAML::Value;
    emit_matrix(out, sc.spawn.mode_transition);
    out << YAML::Key << "class_transition" << YAML::Value;
    emit_matrix(out, sc.spawn.class_transition);
  }
  out << YAML::EndMap;

  out << YAML::Key << "sensors" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : sc.sensors) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << s.id;
    out << YAML::Key << "kind" << YAML::Value << (s.kind == SensorKind::kPolar ? "polar" : "cartesian");
    out << YAML::Key << "position" << YAML::Value;
    emit_vector(out, s.position);
    out << YAML::Key << "range_sigma" << YAML::Value << s.range_sigma;
    out << YAML::Key << "bearing_sigma" << YAML::Value << s.bearing_sigma;
    out << YAML::Key << "threshold" << YAML::Value << s.threshold;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "clutter" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rate" << YAML::Value << sc.clutter.rate;
  out << YAML::Key << "max_range" << YAML::Value << sc.clutter.max_range;
  out << YAML::EndMap;

  out << YAML::Key << "targets" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : sc.targets) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << t.id;
    out << YAML::Key << "class" << YAML::Value << t.label.index + 1;
    out << YAML::Key << "birth_s" << YAML::Value << t.birth_s;
    out << YAML::Key << "death_s" << YAML::Value << t.death_s;
    out << YAML::Key << "initial" << YAML::Value;
    emit_vector(out, t.initial);
    out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : t.segments) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "duration_s" << YAML::Value << s.duration_s;
      out << YAML::Key << "mode" << YAML::Value << (s.mode == MotionMode::kCV ? "cv" : "ct");
      out << YAML::Key << "turn_rate" << YAML::Value << s.turn_rate;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& r = cfg.filter.resampling;
  out << YAML::Key << "filter" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "particles_per_target" << YAML::Value << r.particles_per_target;
  out << YAML::Key << "particles_per_birth" << YAML::Value << r.particles_per_birth;
  out << YAML::Key << "spawn_particles_per_parent" << YAML::Value << cfg.filter.spawn_particles_per_parent;
  out << YAML::Key << "resample_mass_floor" << YAML::Value << r.mass_floor;
  out << YAML::Key << "resample_ess_threshold" << YAML::Value << r.ess_threshold;
  out << YAML::Key << "sensor_order" << YAML::Value << YAML::Flow << cfg.filter.sensor_order;
  out << YAML::EndMap;

  out << YAML::Key << "smoother" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << cfg.smoother_enabled;
  out << YAML::Key << "lag" << YAML::Value << cfg.smoother.lag;
  out << YAML::Key << "gating" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << cfg.smoother.gating.enabled;
  out << YAML::Key << "radius" << YAML::Value << cfg.smoother.gating.radius;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "extraction" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_iterations" << YAML::Value << cfg.extraction.max_iterations;
  out << YAML::Key << "tolerance" << YAML::Value << cfg.extraction.tolerance;
  out << YAML::Key << "class_gate" << YAML::Value << cfg.extraction.class_gate;
  out << YAML::EndMap;

  out << YAML::Key << "ospa" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cutoff" << YAML::Value << cfg.ospa.cutoff;
  out << YAML::Key << "order" << YAML::Value << cfg.ospa.order;
  out << YAML::EndMap;

  out << YAML::Key << "evaluation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "window" << YAML::Value << YAML::Flow << YAML::BeginSeq << cfg.window_first
      << cfg.window_last << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.scenario.seed = *o.seed;
  if (o.lag) cfg.smoother.lag = *o.lag;
  if (o.particles) {
    cfg.filter.resampling.particles_per_target = *o.particles;
    cfg.filter.resampling.particles_per_birth = *o.particles;
  }
  if (o.clutter_rate) cfg.scenario.clutter.rate = *o.clutter_rate;
  if (o.gate_radius) cfg.smoother.gating.radius = *o.gate_radius;
  if (o.no_smoother) cfg.smoother_enabled = false;
  cfg.validate();
}

}  // namespace jdtc
