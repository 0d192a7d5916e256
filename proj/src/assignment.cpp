#include "jdtc/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace jdtc {

namespace {

// rows <= cols. Shortest augmenting paths with row/column potentials.
Assignment solve_wide(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(m + 1), 0);  // row matched to column j (1-based), 0 = free
  std::vector<int> way(static_cast<std::size_t>(m + 1), 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[js];
        if (cur < minv[js]) {
          minv[js] = cur;
          way[js] = j0;
        }
        if (minv[js] < delta) {
          delta = minv[js];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          u[static_cast<std::size_t>(p[js])] += delta;
          v[js] -= delta;
        } else {
          minv[js] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    const int row = p[static_cast<std::size_t>(j)];
    if (row != 0) {
      out.row_to_col[static_cast<std::size_t>(row - 1)] = j - 1;
      out.cost += a(row - 1, j - 1);
    }
  }
  return out;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw std::invalid_argument("solve_assignment: costs must be finite");
  if (cost.rows() == 0 || cost.cols() == 0) {
    return Assignment{std::vector<int>(static_cast<std::size_t>(cost.rows()), -1), 0.0};
  }
  if (cost.rows() <= cost.cols()) return solve_wide(cost);

  const Assignment t = solve_wide(cost.transpose());
  Assignment out;
  out.cost = t.cost;
  out.row_to_col.assign(static_cast<std::size_t>(cost.rows()), -1);
  for (std::size_t col = 0; col < t.row_to_col.size(); ++col) {
    out.row_to_col[static_cast<std::size_t>(t.row_to_col[col])] = static_cast<int>(col);
  }
  return out;
}

}  // namespace jdtc
