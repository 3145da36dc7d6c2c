#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sidewinder {

// Strictly convex quadratic program
//   minimize   1/2 x^T G x + a^T x
//   subject to C x >= d          (one constraint per row of C)
struct QpProblem {
  Eigen::MatrixXd G;
  Eigen::VectorXd a;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd u;        // multipliers per constraint row, 0 when inactive
  std::vector<int> active;  // rows active at the solution
  int iterations = 0;
  bool feasible = true;     // false when the constraints are inconsistent
};

// Dual active-set method (Goldfarb-Idnani): walks from the unconstrained
// minimizer adding violated constraints one at a time, so it needs no
// feasible starting point and certifies inconsistent constraint sets via
// an unbounded dual step. Deterministic: ties break on lowest row index.
// Throws NonConvergence if the iteration budget is exhausted.
QpSolution solve_qp(const QpProblem& qp);

}  // namespace sidewinder
