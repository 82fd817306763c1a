#pragma once

#include <Eigen/Dense>

namespace robeq {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

// Dense two-phase simplex method on a full tableau.
//
//   maximize    c'x
//   subject to  A x = b,  x >= lower
//
// Entries of `lower` may be -infinity (free variables are split internally).
// Pivoting follows Bland's rule, so for a fixed input the returned vertex is
// reproducible. All state lives in the call's own workspace.
LpResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& lower);

// Convenience overload with x >= 0.
LpResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b);

}  // namespace robeq
