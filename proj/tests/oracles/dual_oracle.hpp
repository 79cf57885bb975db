#pragma once

#include <Eigen/Dense>
#include <vector>

// Exhaustive reference solver for tiny soft-margin SVM duals. Every
// assignment of the multipliers to {0, free, C} is tried; the free block is
// solved from the stationarity system with the equality constraint, and the
// best feasible candidate is the global maximum of the concave dual.

namespace oracle {

struct DualOptimum {
  Eigen::VectorXd alpha;
  double objective = 0.0;  // sum(alpha) - 1/2 alpha^T Q alpha
  double bias = 0.0;
};

/// gram: n x n kernel matrix, y: +-1 labels, n <= 10.
DualOptimum brute_force_dual(const Eigen::MatrixXd& gram, const std::vector<int>& y, double c);

}  // namespace oracle
