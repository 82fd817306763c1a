#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "robeq/domain.hpp"

namespace oracle {

// Visits every point of the l1 unit sphere whose coordinates are multiples
// of 1/N (all sign patterns).
inline void for_each_l1_grid_point(int n, int N, const std::function<void(const Eigen::VectorXd&)>& f) {
  std::vector<int> parts(n, 0);
  Eigen::VectorXd z(n);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == n - 1) {
      parts[j] = left;
      // Signs only for nonzero parts.
      std::vector<int> nz;
      for (int k = 0; k < n; ++k)
        if (parts[k] != 0) nz.push_back(k);
      const int combos = 1 << nz.size();
      for (int mask = 0; mask < combos; ++mask) {
        for (int k = 0; k < n; ++k) z[k] = static_cast<double>(parts[k]) / N;
        for (std::size_t b = 0; b < nz.size(); ++b)
          if (mask & (1 << b)) z[nz[b]] = -z[nz[b]];
        f(z);
      }
      return;
    }
    for (int a = 0; a <= left; ++a) {
      parts[j] = a;
      rec(j + 1, left - a);
    }
  };
  rec(0, N);
}

inline int grid_resolution(int n) { return n <= 2 ? 2000 : n == 3 ? 240 : n == 4 ? 48 : 16; }

// Worst-case gap between the sphere maximum and the best grid point.
inline double grid_error_bound(const Eigen::VectorXd& g) {
  return g.lpNorm<Eigen::Infinity>() * 2.0 * static_cast<double>(g.size()) / grid_resolution(static_cast<int>(g.size()));
}

// max <g, z> over grid points of the l1 sphere that lie in the cone;
// -inf when none does.
inline double sphere_max_in_cone(const Eigen::VectorXd& g, const robeq::TangentConeRep& cone) {
  const int n = cone.dim();
  const int N = grid_resolution(n);
  double best = -std::numeric_limits<double>::infinity();
  for_each_l1_grid_point(n, N, [&](const Eigen::VectorXd& z) {
    if (cone.contains(z, 1e-9)) best = std::max(best, g.dot(z));
  });
  return best;
}

// Feasible-direction test: x + t z stays in the domain for a small t.
inline bool is_feasible_direction(const robeq::ProductDomain& d, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& z, double t = 1e-7) {
  return d.contains(x + t * z, 1e-12);
}

}  // namespace oracle
