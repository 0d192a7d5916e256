#pragma once

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

struct Assignment {
  /// Column assigned to each row, or -1 (only when rows > cols).
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost assignment of min(rows, cols) pairs (Hungarian method with
/// potentials, O(n^2 m)). Costs must be finite.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace jdtc
