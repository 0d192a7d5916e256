#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace jdtc {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Kinematic state [x, vx, y, vy, omega] in m, m/s, m, m/s, rad/s.
using KinematicState = Vector5;

namespace axis {
inline constexpr int kX = 0;
inline constexpr int kVx = 1;
inline constexpr int kY = 2;
inline constexpr int kVy = 3;
inline constexpr int kOmega = 4;
}  // namespace axis

using Rng = std::mt19937_64;

/// Jump-Markov motion model index. A CV-mode state carries no turn rate:
/// its omega slot is identically zero and is not a density coordinate.
enum class MotionMode : std::uint8_t { kCV = 0, kCT = 1 };

inline constexpr int kNumModes = 2;

constexpr int mode_index(MotionMode m) { return static_cast<int>(m); }
constexpr MotionMode mode_from_index(int i) { return static_cast<MotionMode>(i); }

/// Zero-based class index. Configuration files and reports use one-based labels.
struct ClassLabel {
  int index = 0;

  friend bool operator==(ClassLabel, ClassLabel) = default;
};

/// Single-target augmented state: kinematics, motion mode and class.
struct AugmentedState {
  KinematicState kin = KinematicState::Zero();
  MotionMode mode = MotionMode::kCV;
  ClassLabel label;
};

struct Particle {
  double weight = 0.0;
  AugmentedState state;
};

/// Row-stochastic matrix; rows are checked to sum to one on construction.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(Eigen::MatrixXd p);

  static StochasticMatrix identity(int n);

  [[nodiscard]] int size() const { return static_cast<int>(p_.rows()); }
  [[nodiscard]] double operator()(int from, int to) const { return p_(from, to); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return p_; }

  /// Draw a destination index from row `from`.
  int sample(int from, Rng& rng) const;

 private:
  Eigen::MatrixXd p_;
};

// ---- Motion models ----

KinematicState cv_transition(const KinematicState& state, double dt);
Matrix5 cv_process_cov(double dt, double l);

KinematicState ct_transition(const KinematicState& state, double dt);
Matrix5 ct_process_cov(double dt, double l1, double l2);

/// Zero-mean Gaussian on the coordinates a motion mode carries (4 for CV,
/// 5 for CT). Keeps the inverse Cholesky factor so Mahalanobis distances are
/// one triangular matrix-vector product.
class ModeGaussian {
 public:
  ModeGaussian() = default;
  ModeGaussian(const Matrix5& cov, MotionMode mode);

  [[nodiscard]] double sq_mahalanobis(const Vector5& diff) const {
    return (inv_chol_ * diff).squaredNorm();
  }
  [[nodiscard]] double log_density_from_sq(double sq) const { return log_norm_ - 0.5 * sq; }
  [[nodiscard]] double log_density(const Vector5& diff) const {
    return log_density_from_sq(sq_mahalanobis(diff));
  }
  /// Largest marginal standard deviation of the two position coordinates.
  [[nodiscard]] double position_sigma() const { return position_sigma_; }
  [[nodiscard]] MotionMode mode() const { return mode_; }

  /// mean + noise, with the omega slot zeroed under CV.
  [[nodiscard]] Vector5 sample(const Vector5& mean, Rng& rng) const;

 private:
  MotionMode mode_ = MotionMode::kCV;
  Matrix5 chol_ = Matrix5::Zero();
  Matrix5 inv_chol_ = Matrix5::Zero();
  double log_norm_ = 0.0;
  double position_sigma_ = 0.0;
};

struct MotionNoise {
  double cv_l = 1.0;   // m^2/s^3
  double ct_l1 = 1.0;  // m^2/s^3
  double ct_l2 = 0.1;  // rad^2/s^3
};

/// CV/CT jump-Markov transition with per-class mode transition matrices.
class MotionModel {
 public:
  MotionModel() = default;
  MotionModel(double dt, MotionNoise noise, std::vector<StochasticMatrix> mode_transition);

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] const MotionNoise& noise_params() const { return noise_params_; }
  [[nodiscard]] KinematicState predict_mean(const KinematicState& state, MotionMode next) const;
  [[nodiscard]] const Matrix5& process_cov(MotionMode mode) const { return cov_[mode_index(mode)]; }
  [[nodiscard]] const ModeGaussian& noise(MotionMode mode) const { return noise_[mode_index(mode)]; }
  [[nodiscard]] const StochasticMatrix& mode_transition(ClassLabel c) const;
  [[nodiscard]] int num_classes() const { return static_cast<int>(mode_transition_.size()); }

  /// Log density of the kinematic transition from `from` to `to` under `to.mode`.
  [[nodiscard]] double log_kinematic_density(const AugmentedState& to, const AugmentedState& from) const;

 private:
  double dt_ = 1.0;
  MotionNoise noise_params_;
  Matrix5 cov_[kNumModes];
  ModeGaussian noise_[kNumModes];
  std::vector<StochasticMatrix> mode_transition_;
};

/// Mode from the class's transition row, then kinematics from the new mode.
/// The class label never changes.
AugmentedState sample_motion(const AugmentedState& state, const MotionModel& model, Rng& rng);

// ---- Survival, birth, spawn ----

struct SurvivalModel {
  double ps = 0.99;

  [[nodiscard]] double operator()(const AugmentedState& /*state*/) const { return ps; }
};

struct GaussianComponent {
  double weight = 0.0;
  KinematicState mean = KinematicState::Zero();
  Matrix5 cov = Matrix5::Identity();
};

/// Per-class Gaussian-mixture birth intensity. Birth mode is uniform over
/// {CV, CT}, so gamma(x, r, c) = 0.5 * sum_i w_i N_r(x; m_i, P_i).
class BirthModel {
 public:
  BirthModel() = default;
  explicit BirthModel(std::vector<std::vector<GaussianComponent>> per_class);

  [[nodiscard]] int num_classes() const { return static_cast<int>(components_.size()); }
  [[nodiscard]] const std::vector<GaussianComponent>& components(ClassLabel c) const;
  [[nodiscard]] double mass(ClassLabel c) const;
  [[nodiscard]] double density(const AugmentedState& state) const;

 private:
  std::vector<std::vector<GaussianComponent>> components_;
  // [class][component][mode]
  std::vector<std::vector<std::array<ModeGaussian, kNumModes>>> gaussians_;
};

/// n particles per component of the class, each of weight w_i / n.
std::vector<Particle> sample_birth(const BirthModel& model, ClassLabel c, int n, Rng& rng);

struct SpawnModel {
  double lambda = 0.0;
  Matrix5 kin_cov = Matrix5::Identity();
  StochasticMatrix mode_transition = StochasticMatrix::identity(kNumModes);
  StochasticMatrix class_transition;

  SpawnModel() = default;
  SpawnModel(double lambda, Matrix5 kin_cov, StochasticMatrix mode_transition,
             StochasticMatrix class_transition);

  [[nodiscard]] const ModeGaussian& noise(MotionMode m) const { return noise_[mode_index(m)]; }
  /// beta(child | parent) = lambda f_beta(x | x') f(r | r') b(c | c').
  [[nodiscard]] double density(const AugmentedState& child, const AugmentedState& parent) const;

 private:
  ModeGaussian noise_[kNumModes];
};

/// Spawns n children about the parent. Child classes are drawn by systematic
/// sampling of b(. | parent class), and each class stratum carries exactly
/// parent.weight * lambda * b(c | c') (requires n * b >= 1 for every class
/// with positive spawn probability).
std::vector<Particle> sample_spawn(const SpawnModel& model, const Particle& parent, int n, Rng& rng);

/// Everything predict and the backward kernel need.
struct TargetModels {
  MotionModel motion;
  SurvivalModel survival;
  BirthModel birth;
  SpawnModel spawn;

  [[nodiscard]] int num_classes() const { return motion.num_classes(); }
};

}  // namespace jdtc
