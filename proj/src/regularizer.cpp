#include "robeq/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robeq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool kernel_on_box(const PlayerDomain& d) {
  return d.kind() == DomainKind::Interval || d.kind() == DomainKind::Box;
}

bool registered(const PlayerRegularizer& r, const PlayerDomain& d) {
  if (r.kind == PlayerRegularizer::Kind::Quadratic) {
    return d.kind() != DomainKind::Polytope;
  }
  if (kernel_on_box(d)) return true;
  return d.kind() == DomainKind::Simplex && r.kernel.name == "entropic";
}

Eigen::VectorXd logit(const Eigen::VectorXd& y) {
  const double top = y.maxCoeff();
  Eigen::VectorXd e = (y.array() - top).exp().matrix();
  return e / e.sum();
}

// Enumerates lattice points of a player domain (ambient dim <= 3).
template <typename Visit>
void for_each_lattice_point(const PlayerDomain& d, double step, Visit&& visit) {
  const int n = d.dim();
  if (n > 3) throw UnsupportedError("brute-force mirror supports ambient dimension <= 3");
  if (d.kind() == DomainKind::Simplex) {
    const int k = static_cast<int>(std::llround(1.0 / step));
    Eigen::VectorXd x(n);
    if (n == 1) {
      x[0] = 1.0;
      visit(x);
    } else if (n == 2) {
      for (int i = 0; i <= k; ++i) {
        x << double(i) / k, double(k - i) / k;
        visit(x);
      }
    } else {
      for (int i = 0; i <= k; ++i) {
        for (int j = 0; i + j <= k; ++j) {
          x << double(i) / k, double(j) / k, double(k - i - j) / k;
          visit(x);
        }
      }
    }
    return;
  }
  if (!kernel_on_box(d)) throw UnsupportedError("brute-force mirror: polytope domains unsupported");
  std::vector<int> counts(n), idx(n, 0);
  for (int j = 0; j < n; ++j) {
    counts[j] = static_cast<int>(std::llround((d.upper()[j] - d.lower()[j]) / step));
  }
  Eigen::VectorXd x(n);
  for (;;) {
    for (int j = 0; j < n; ++j) {
      x[j] = d.lower()[j] + (d.upper()[j] - d.lower()[j]) * idx[j] / counts[j];
    }
    visit(x);
    int j = 0;
    while (j < n && ++idx[j] > counts[j]) idx[j++] = 0;
    if (j == n) break;
  }
}

}  // namespace

bool Kernel::steep() const { return theta_prime_at_zero == -kInf; }

Kernel Kernel::entropic() {
  Kernel k;
  k.name = "entropic";
  k.theta = [](double z) { return z > 0 ? z * std::log(z) : 0.0; };
  k.theta_prime = [](double z) { return z > 0 ? std::log(z) + 1.0 : -kInf; };
  k.theta_prime_inv = [](double w) { return std::exp(w - 1.0); };
  k.theta_prime_at_zero = -kInf;
  return k;
}

Kernel Kernel::sqrt_kernel() {
  Kernel k;
  k.name = "sqrt";
  k.theta = [](double z) { return -2.0 * std::sqrt(std::max(z, 0.0)); };
  k.theta_prime = [](double z) { return z > 0 ? -1.0 / std::sqrt(z) : -kInf; };
  k.theta_prime_inv = [](double w) { return w < 0 ? 1.0 / (w * w) : kInf; };
  k.theta_prime_at_zero = -kInf;
  return k;
}

Kernel Kernel::quadratic() {
  Kernel k;
  k.name = "quadratic";
  k.theta = [](double z) { return 0.5 * z * z; };
  k.theta_prime = [](double z) { return z; };
  k.theta_prime_inv = [](double w) { return std::max(w, 0.0); };
  k.theta_prime_at_zero = 0.0;
  return k;
}

PlayerRegularizer PlayerRegularizer::euclidean() { return {}; }

PlayerRegularizer PlayerRegularizer::with_kernel(Kernel k) {
  PlayerRegularizer r;
  r.kind = Kind::Kernel;
  r.kernel = std::move(k);
  return r;
}

PlayerRegularizer PlayerRegularizer::named(const std::string& name) {
  if (name == "euclidean") return euclidean();
  if (name == "entropic") return with_kernel(Kernel::entropic());
  if (name == "sqrt") return with_kernel(Kernel::sqrt_kernel());
  if (name == "quadratic_kernel") return with_kernel(Kernel::quadratic());
  throw std::invalid_argument("unknown regularizer '" + name + "'");
}

std::string PlayerRegularizer::name() const {
  if (kind == Kind::Quadratic) return "euclidean";
  return kernel.name == "quadratic" ? "quadratic_kernel" : kernel.name;
}

bool RegularizerSpec::all_steep() const {
  return std::all_of(per_player_.begin(), per_player_.end(),
                     [](const PlayerRegularizer& r) { return r.steep(); });
}

void validate_pairs(const RegularizerSpec& reg, const ProductDomain& domain) {
  if (reg.num_players() != domain.num_players()) {
    throw std::invalid_argument("regularizer count does not match player count");
  }
  for (int i = 0; i < domain.num_players(); ++i) {
    if (!registered(reg.player(i), domain.player(i))) {
      throw UnsupportedError("no mirror map registered for regularizer '" + reg.player(i).name() +
                             "' on a " + to_string(domain.player(i).kind()) + " domain");
    }
  }
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, tau = 0.0;
  for (int k = 0; k < n; ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / (k + 1);
    if (u[k] - t > 0) tau = t;
  }
  return (v.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd mirror(const RegularizerSpec& reg, const ProductDomain& domain,
                       const Eigen::VectorXd& y) {
  Eigen::VectorXd x(domain.total_dim());
  for (int i = 0; i < domain.num_players(); ++i) {
    const auto& d = domain.player(i);
    const auto& r = reg.player(i);
    const Eigen::VectorXd yi = domain.block(y, i);
    auto xi = domain.block(x, i);
    if (!registered(r, d)) {
      throw UnsupportedError("no mirror map registered for regularizer '" + r.name() + "' on a " +
                             to_string(d.kind()) + " domain");
    }
    if (r.kind == PlayerRegularizer::Kind::Quadratic) {
      if (d.kind() == DomainKind::Simplex) xi = project_simplex(yi);
      else xi = yi.cwiseMax(d.lower()).cwiseMin(d.upper());
    } else if (d.kind() == DomainKind::Simplex) {
      xi = logit(yi);
    } else {
      for (int j = 0; j < d.dim(); ++j) {
        const double lo = d.lower()[j], hi = d.upper()[j];
        const double z = r.kernel.theta_prime_inv(yi[j]);
        xi[j] = std::clamp(lo + z, lo, hi);
      }
    }
  }
  return x;
}

double regularizer_value(const PlayerRegularizer& r, const PlayerDomain& d,
                         const Eigen::VectorXd& x) {
  if (r.kind == PlayerRegularizer::Kind::Quadratic) return 0.5 * x.squaredNorm();
  double h = 0.0;
  for (int j = 0; j < d.dim(); ++j) {
    const double lo = std::isfinite(d.lower()[j]) ? d.lower()[j] : 0.0;
    h += r.kernel.theta(x[j] - lo);
  }
  return h;
}

Eigen::VectorXd mirror_bruteforce(const RegularizerSpec& reg, const ProductDomain& domain,
                                  const Eigen::VectorXd& y, double grid_step) {
  Eigen::VectorXd x(domain.total_dim());
  for (int i = 0; i < domain.num_players(); ++i) {
    const auto& d = domain.player(i);
    const Eigen::VectorXd yi = domain.block(y, i);
    double best = -kInf;
    Eigen::VectorXd arg;
    for_each_lattice_point(d, grid_step, [&](const Eigen::VectorXd& p) {
      const double v = yi.dot(p) - regularizer_value(reg.player(i), d, p);
      if (v > best) {
        best = v;
        arg = p;
      }
    });
    domain.block(x, i) = arg;
  }
  return x;
}

Eigen::VectorXd grad_h(const RegularizerSpec& reg, const ProductDomain& domain,
                       const Eigen::VectorXd& x) {
  Eigen::VectorXd g(domain.total_dim());
  for (int i = 0; i < domain.num_players(); ++i) {
    const auto& d = domain.player(i);
    const auto& r = reg.player(i);
    const Eigen::VectorXd xi = domain.block(x, i);
    auto gi = domain.block(g, i);
    if (r.kind == PlayerRegularizer::Kind::Quadratic) {
      gi = xi;
      continue;
    }
    for (int j = 0; j < d.dim(); ++j) {
      const double lo = std::isfinite(d.lower()[j]) ? d.lower()[j] : 0.0;
      const double z = xi[j] - lo;
      if (z <= 0.0) {
        if (r.kernel.steep()) {
          throw SteepnessError("grad_h requested on the boundary under steep kernel '" +
                               r.kernel.name + "'");
        }
        gi[j] = r.kernel.theta_prime_at_zero;
      } else {
        gi[j] = r.kernel.theta_prime(z);
      }
    }
  }
  return g;
}

double rate_function(const Kernel& kernel, double z) {
  if (z > kernel.theta_prime_at_zero) return kernel.theta_prime_inv(z);
  return 0.0;
}

}  // namespace robeq
