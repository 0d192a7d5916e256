#include "jdtc/state_space.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jdtc {

namespace {

constexpr double kRowSumTol = 1e-12;

void require_finite(const KinematicState& s, const char* what) {
  if (!s.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite kinematic state");
  }
}

}  // namespace

// ---- StochasticMatrix ----

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols() || p_.rows() == 0) {
    throw std::invalid_argument("stochastic matrix must be square and non-empty");
  }
  for (int i = 0; i < p_.rows(); ++i) {
    for (int j = 0; j < p_.cols(); ++j) {
      if (!(p_(i, j) >= 0.0 && p_(i, j) <= 1.0)) {
        throw std::invalid_argument("stochastic matrix entry outside [0, 1]");
      }
    }
    if (std::abs(p_.row(i).sum() - 1.0) > kRowSumTol) {
      throw std::invalid_argument("stochastic matrix row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

StochasticMatrix StochasticMatrix::identity(int n) {
  return StochasticMatrix(Eigen::MatrixXd::Identity(n, n));
}

int StochasticMatrix::sample(int from, Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  double acc = 0.0;
  const int n = size();
  for (int j = 0; j < n; ++j) {
    acc += p_(from, j);
    if (u < acc) return j;
  }
  // u landed in the rounding slack of the last positive entry
  for (int j = n - 1; j >= 0; --j) {
    if (p_(from, j) > 0.0) return j;
  }
  return n - 1;
}

// ---- Motion models ----

KinematicState cv_transition(const KinematicState& state, double dt) {
  require_finite(state, "cv_transition");
  if (dt < 0.0) throw std::invalid_argument("cv_transition: dt must be >= 0");
  KinematicState out;
  out[axis::kX] = state[axis::kX] + dt * state[axis::kVx];
  out[axis::kVx] = state[axis::kVx];
  out[axis::kY] = state[axis::kY] + dt * state[axis::kVy];
  out[axis::kVy] = state[axis::kVy];
  out[axis::kOmega] = 0.0;
  return out;
}

Matrix5 cv_process_cov(double dt, double l) {
  if (dt < 0.0 || l < 0.0) throw std::invalid_argument("cv_process_cov: dt and l must be >= 0");
  Matrix5 q = Matrix5::Zero();
  const double q11 = dt * dt * dt * l / 3.0;
  const double q12 = dt * dt * l / 2.0;
  const double q22 = dt * l;
  for (int base : {axis::kX, axis::kY}) {
    q(base, base) = q11;
    q(base, base + 1) = q12;
    q(base + 1, base) = q12;
    q(base + 1, base + 1) = q22;
  }
  return q;
}

KinematicState ct_transition(const KinematicState& state, double dt) {
  require_finite(state, "ct_transition");
  if (dt < 0.0) throw std::invalid_argument("ct_transition: dt must be >= 0");
  const double w = state[axis::kOmega];
  const double wt = w * dt;
  const double c = std::cos(wt);
  const double s = std::sin(wt);
  double sin_over_w;
  double one_minus_cos_over_w;
  if (std::abs(wt) < 1e-6) {
    sin_over_w = dt * (1.0 - wt * wt / 6.0);
    one_minus_cos_over_w = dt * wt / 2.0;
  } else {
    sin_over_w = s / w;
    one_minus_cos_over_w = (1.0 - c) / w;
  }
  const double vx = state[axis::kVx];
  const double vy = state[axis::kVy];
  KinematicState out;
  out[axis::kX] = state[axis::kX] + sin_over_w * vx - one_minus_cos_over_w * vy;
  out[axis::kVx] = c * vx - s * vy;
  out[axis::kY] = state[axis::kY] + one_minus_cos_over_w * vx + sin_over_w * vy;
  out[axis::kVy] = s * vx + c * vy;
  out[axis::kOmega] = w;
  return out;
}

Matrix5 ct_process_cov(double dt, double l1, double l2) {
  if (l2 < 0.0) throw std::invalid_argument("ct_process_cov: l2 must be >= 0");
  Matrix5 q = cv_process_cov(dt, l1);
  q(axis::kOmega, axis::kOmega) = dt * l2;
  return q;
}

// ---- ModeGaussian ----

ModeGaussian::ModeGaussian(const Matrix5& cov, MotionMode mode) : mode_(mode) {
  const int dim = mode == MotionMode::kCV ? 4 : 5;
  const Eigen::MatrixXd sub = cov.topLeftCorner(dim, dim);
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("ModeGaussian: covariance is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd l_inv =
      l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim, dim));
  chol_.topLeftCorner(dim, dim) = l;
  inv_chol_.topLeftCorner(dim, dim) = l_inv;
  log_norm_ = -0.5 * dim * std::log(2.0 * std::numbers::pi);
  for (int i = 0; i < dim; ++i) log_norm_ -= std::log(l(i, i));
  position_sigma_ = std::sqrt(std::max(cov(axis::kX, axis::kX), cov(axis::kY, axis::kY)));
}

Vector5 ModeGaussian::sample(const Vector5& mean, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector5 n;
  for (int i = 0; i < 5; ++i) n[i] = normal(rng);
  if (mode_ == MotionMode::kCV) n[axis::kOmega] = 0.0;
  Vector5 out = mean + chol_ * n;
  if (mode_ == MotionMode::kCV) out[axis::kOmega] = 0.0;
  return out;
}

// ---- MotionModel ----

MotionModel::MotionModel(double dt, MotionNoise noise, std::vector<StochasticMatrix> mode_transition)
    : dt_(dt), noise_params_(noise), mode_transition_(std::move(mode_transition)) {
  if (!(dt > 0.0)) throw std::invalid_argument("MotionModel: dt must be > 0");
  if (mode_transition_.empty()) throw std::invalid_argument("MotionModel: at least one class required");
  for (const auto& m : mode_transition_) {
    if (m.size() != kNumModes) throw std::invalid_argument("MotionModel: mode transition must be 2x2");
  }
  cov_[mode_index(MotionMode::kCV)] = cv_process_cov(dt, noise.cv_l);
  cov_[mode_index(MotionMode::kCT)] = ct_process_cov(dt, noise.ct_l1, noise.ct_l2);
  for (int m = 0; m < kNumModes; ++m) noise_[m] = ModeGaussian(cov_[m], mode_from_index(m));
}

KinematicState MotionModel::predict_mean(const KinematicState& state, MotionMode next) const {
  return next == MotionMode::kCV ? cv_transition(state, dt_) : ct_transition(state, dt_);
}

const StochasticMatrix& MotionModel::mode_transition(ClassLabel c) const {
  return mode_transition_.at(static_cast<std::size_t>(c.index));
}

double MotionModel::log_kinematic_density(const AugmentedState& to, const AugmentedState& from) const {
  return noise(to.mode).log_density(to.kin - predict_mean(from.kin, to.mode));
}

AugmentedState sample_motion(const AugmentedState& state, const MotionModel& model, Rng& rng) {
  AugmentedState out;
  out.label = state.label;
  out.mode = mode_from_index(model.mode_transition(state.label).sample(mode_index(state.mode), rng));
  out.kin = model.noise(out.mode).sample(model.predict_mean(state.kin, out.mode), rng);
  return out;
}

// ---- Birth ----

BirthModel::BirthModel(std::vector<std::vector<GaussianComponent>> per_class)
    : components_(std::move(per_class)) {
  gaussians_.resize(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    for (const auto& comp : components_[c]) {
      if (comp.weight < 0.0) throw std::invalid_argument("BirthModel: negative component weight");
      gaussians_[c].push_back({ModeGaussian(comp.cov, MotionMode::kCV),
                               ModeGaussian(comp.cov, MotionMode::kCT)});
    }
  }
}

const std::vector<GaussianComponent>& BirthModel::components(ClassLabel c) const {
  if (c.index < 0 || c.index >= num_classes()) {
    throw std::out_of_range("BirthModel: class " + std::to_string(c.index + 1) + " not configured");
  }
  return components_[static_cast<std::size_t>(c.index)];
}

double BirthModel::mass(ClassLabel c) const {
  double m = 0.0;
  for (const auto& comp : components(c)) m += comp.weight;
  return m;
}

double BirthModel::density(const AugmentedState& state) const {
  const auto& comps = components(state.label);
  const auto& gs = gaussians_[static_cast<std::size_t>(state.label.index)];
  double d = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].weight == 0.0) continue;
    d += comps[i].weight * 0.5 *
         std::exp(gs[i][mode_index(state.mode)].log_density(state.kin - comps[i].mean));
  }
  return d;
}

std::vector<Particle> sample_birth(const BirthModel& model, ClassLabel c, int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample_birth: n must be > 0");
  const auto& comps = model.components(c);
  std::vector<Particle> out;
  out.reserve(comps.size() * static_cast<std::size_t>(n));
  std::bernoulli_distribution coin(0.5);
  for (const auto& comp : comps) {
    if (comp.weight == 0.0) continue;
    const ModeGaussian cv(comp.cov, MotionMode::kCV);
    const ModeGaussian ct(comp.cov, MotionMode::kCT);
    const double w = comp.weight / n;
    for (int i = 0; i < n; ++i) {
      Particle p;
      p.weight = w;
      p.state.label = c;
      p.state.mode = coin(rng) ? MotionMode::kCT : MotionMode::kCV;
      p.state.kin = (p.state.mode == MotionMode::kCV ? cv : ct).sample(comp.mean, rng);
      out.push_back(p);
    }
  }
  return out;
}

// ---- Spawn ----

SpawnModel::SpawnModel(double lambda_, Matrix5 kin_cov_, StochasticMatrix mode_transition_,
                       StochasticMatrix class_transition_)
    : lambda(lambda_),
      kin_cov(kin_cov_),
      mode_transition(std::move(mode_transition_)),
      class_transition(std::move(class_transition_)) {
  if (lambda < 0.0) throw std::invalid_argument("SpawnModel: lambda must be >= 0");
  if (mode_transition.size() != kNumModes) {
    throw std::invalid_argument("SpawnModel: mode transition must be 2x2");
  }
  for (int m = 0; m < kNumModes; ++m) noise_[m] = ModeGaussian(kin_cov, mode_from_index(m));
}

double SpawnModel::density(const AugmentedState& child, const AugmentedState& parent) const {
  if (lambda == 0.0) return 0.0;
  const double pm = mode_transition(mode_index(parent.mode), mode_index(child.mode));
  const double pc = class_transition(parent.label.index, child.label.index);
  if (pm == 0.0 || pc == 0.0) return 0.0;
  return lambda * pm * pc * std::exp(noise(child.mode).log_density(child.kin - parent.kin));
}

std::vector<Particle> sample_spawn(const SpawnModel& model, const Particle& parent, int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample_spawn: n must be > 0");
  std::vector<Particle> out;
  if (model.lambda == 0.0 || parent.weight == 0.0) return out;

  const int from = parent.state.label.index;
  const int num_classes = model.class_transition.size();
  std::uniform_real_distribution<double> uni(0.0, 1.0 / n);
  double u = uni(rng);
  std::vector<int> classes(static_cast<std::size_t>(n));
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  double cumulative = model.class_transition(from, 0);
  int c = 0;
  for (int j = 0; j < n; ++j, u += 1.0 / n) {
    while (u >= cumulative && c < num_classes - 1) cumulative += model.class_transition(from, ++c);
    classes[static_cast<std::size_t>(j)] = c;
    ++counts[static_cast<std::size_t>(c)];
  }

  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int cls = classes[static_cast<std::size_t>(j)];
    Particle p;
    p.weight = parent.weight * model.lambda * model.class_transition(from, cls) /
               counts[static_cast<std::size_t>(cls)];
    p.state.label = ClassLabel{cls};
    p.state.mode =
        mode_from_index(model.mode_transition.sample(mode_index(parent.state.mode), rng));
    p.state.kin = model.noise(p.state.mode).sample(parent.state.kin, rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace jdtc
