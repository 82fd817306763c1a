#include "robeq/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace robeq {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Tableau in canonical form: rows 0..m-1 are constraints, the last row holds
// reduced costs of the minimization objective, the last column the rhs.
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<int> basis;

  int rows() const { return static_cast<int>(basis.size()); }
  int cols() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int col) {
    t.row(r) /= t(r, col);
    for (int i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(r);
    }
    basis[r] = col;
  }

  // Minimizes the objective row over columns [0, ncols). Returns false if
  // unbounded.
  bool run(int ncols) {
    const int obj = rows();
    for (;;) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (t(obj, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < obj; ++i) {
        const double a = t(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t(i, cols()) / a;
        if (ratio < best - 1e-13 ||
            (std::abs(ratio - best) <= 1e-13 && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& lower) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != m || lower.size() != n) {
    throw std::invalid_argument("lp_solve: dimension mismatch");
  }

  // x = lower + x' for finite bounds; x = x+ - x- for free variables.
  std::vector<int> plus(n), minus(n, -1);
  int nv = 0;
  for (int j = 0; j < n; ++j) {
    plus[j] = nv++;
    if (!std::isfinite(lower[j])) minus[j] = nv++;
  }
  Eigen::MatrixXd As = Eigen::MatrixXd::Zero(m, nv);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXd bs = b;
  for (int j = 0; j < n; ++j) {
    As.col(plus[j]) = A.col(j);
    cs[plus[j]] = c[j];
    if (minus[j] >= 0) {
      As.col(minus[j]) = -A.col(j);
      cs[minus[j]] = -c[j];
    } else if (lower[j] != 0.0) {
      bs -= A.col(j) * lower[j];
    }
  }

  // Phase 1 over [structural | artificial | rhs].
  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m + 1, nv + m + 1);
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = bs[i] < 0 ? -1.0 : 1.0;
    tab.t.row(i).head(nv) = sign * As.row(i);
    tab.t(i, nv + i) = 1.0;
    tab.t(i, nv + m) = sign * bs[i];
    tab.basis[i] = nv + i;
  }
  for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  for (int i = 0; i < m; ++i) tab.t(m, nv + i) = 0.0;
  tab.run(nv + m);

  LpResult res;
  const double scale = 1.0 + (m > 0 ? bs.cwiseAbs().maxCoeff() : 0.0);
  if (m > 0 && -tab.t(m, nv + m) > kFeasTol * scale) {
    res.status = LpStatus::Infeasible;
    return res;
  }

  // Drive remaining artificials out of the basis; drop redundant rows.
  for (int i = 0; i < tab.rows();) {
    if (tab.basis[i] < nv) {
      ++i;
      continue;
    }
    int col = -1;
    for (int j = 0; j < nv; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
      ++i;
    } else {
      Eigen::MatrixXd keep(tab.t.rows() - 1, tab.t.cols());
      keep << tab.t.topRows(i), tab.t.bottomRows(tab.t.rows() - i - 1);
      tab.t = std::move(keep);
      tab.basis.erase(tab.basis.begin() + i);
    }
  }

  // Phase 2: reduced costs for min(-c's).
  const int mr = tab.rows();
  Eigen::MatrixXd t2(mr + 1, nv + 1);
  t2.topLeftCorner(mr, nv) = tab.t.topLeftCorner(mr, nv);
  t2.topRightCorner(mr, 1) = tab.t.topRightCorner(mr, 1);
  t2.row(mr).setZero();
  t2.row(mr).head(nv) = -cs.transpose();
  for (int i = 0; i < mr; ++i) {
    const int bj = tab.basis[i];
    if (t2(mr, bj) != 0.0) t2.row(mr) -= t2(mr, bj) * t2.row(i);
  }
  tab.t = std::move(t2);
  if (!tab.run(nv)) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  Eigen::VectorXd xs = Eigen::VectorXd::Zero(nv);
  for (int i = 0; i < mr; ++i) xs[tab.basis[i]] = tab.t(i, nv);
  res.x.resize(n);
  for (int j = 0; j < n; ++j) {
    res.x[j] = minus[j] >= 0 ? xs[plus[j]] - xs[minus[j]] : xs[plus[j]] + lower[j];
  }
  res.value = c.dot(res.x);
  res.status = LpStatus::Optimal;
  return res;
}

LpResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b) {
  return lp_solve(c, A, b, Eigen::VectorXd::Zero(c.size()));
}

}  // namespace robeq
