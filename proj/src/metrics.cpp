#include "jdtc/metrics.hpp"

#include "jdtc/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jdtc {

void OspaParams::validate() const {
  if (!(cutoff > 0.0)) throw std::invalid_argument("OSPA cutoff must be > 0");
  if (!(order >= 1.0)) throw std::invalid_argument("OSPA order must be >= 1");
}

double ospa(const std::vector<Eigen::Vector2d>& estimates, const std::vector<Eigen::Vector2d>& truth,
            const OspaParams& params) {
  params.validate();
  const std::size_t m = estimates.size();
  const std::size_t n = truth.size();
  if (m == 0 && n == 0) return 0.0;
  if (m == 0 || n == 0) return params.cutoff;

  const double c = params.cutoff;
  const double p = params.order;
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!estimates[i].allFinite() || !truth[j].allFinite()) throw std::invalid_argument("ospa: non-finite point");
      const double d = std::min((estimates[i] - truth[j]).norm(), c);
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(d, p);
    }
  }
  const double matched = solve_assignment(cost).cost;
  const std::size_t big = std::max(m, n);
  const std::size_t gap = big - std::min(m, n);
  const double total = (matched + std::pow(c, p) * static_cast<double>(gap)) / static_cast<double>(big);
  return std::min(std::pow(total, 1.0 / p), c);
}

ClassOspa per_class_ospa(const std::vector<TrackEstimate>& estimates, const std::vector<LabeledPoint>& truth,
                         int num_classes, const OspaParams& params) {
  ClassOspa out;
  std::vector<Eigen::Vector2d> all_est;
  std::vector<Eigen::Vector2d> all_truth;
  for (const auto& e : estimates) all_est.emplace_back(e.kin[axis::kX], e.kin[axis::kY]);
  for (const auto& t : truth) all_truth.push_back(t.position);
  out.combined = ospa(all_est, all_truth, params);

  for (int c = 0; c < num_classes; ++c) {
    std::vector<Eigen::Vector2d> est;
    std::vector<Eigen::Vector2d> tru;
    for (const auto& e : estimates) {
      if (e.label.index == c) est.emplace_back(e.kin[axis::kX], e.kin[axis::kY]);
    }
    for (const auto& t : truth) {
      if (t.label.index == c) tru.push_back(t.position);
    }
    out.per_class.push_back(ospa(est, tru, params));
  }
  return out;
}

}  // namespace jdtc
