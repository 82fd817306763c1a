#include "robeq/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robeq/lp.hpp"

namespace robeq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTol = 1e-10;

int matrix_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(kRankTol);
  return static_cast<int>(lu.rank());
}

// Advances `idx` to the next k-subset of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Box: return "box";
    case DomainKind::Simplex: return "simplex";
    case DomainKind::Polytope: return "polytope";
  }
  return "unknown";
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, int cols) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(kRankTol);
  const int k = static_cast<int>(lu.dimensionOfKernel());
  if (k == 0) return Eigen::MatrixXd(cols, 0);
  const Eigen::MatrixXd kernel = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, k);
  return q;
}

PlayerDomain PlayerDomain::interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("interval requires finite lo < hi");
  }
  PlayerDomain d;
  d.kind_ = DomainKind::Interval;
  d.lower_ = Eigen::VectorXd::Constant(1, lo);
  d.upper_ = Eigen::VectorXd::Constant(1, hi);
  d.eq_ = Eigen::MatrixXd(0, 1);
  d.eq_rhs_ = Eigen::VectorXd(0);
  d.finalize();
  return d;
}

PlayerDomain PlayerDomain::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("box bounds must be nonempty and of equal length");
  }
  for (int j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j]) || !std::isfinite(lo[j]) || !std::isfinite(hi[j])) {
      throw std::invalid_argument("box requires finite lo_j < hi_j");
    }
  }
  PlayerDomain d;
  d.kind_ = DomainKind::Box;
  const auto n = lo.size();
  d.lower_ = std::move(lo);
  d.upper_ = std::move(hi);
  d.eq_ = Eigen::MatrixXd(0, n);
  d.eq_rhs_ = Eigen::VectorXd(0);
  d.finalize();
  return d;
}

PlayerDomain PlayerDomain::simplex(int dim) {
  if (dim < 1) throw std::invalid_argument("simplex dimension must be >= 1");
  PlayerDomain d;
  d.kind_ = DomainKind::Simplex;
  d.eq_ = Eigen::MatrixXd::Ones(1, dim);
  d.eq_rhs_ = Eigen::VectorXd::Ones(1);
  d.lower_ = Eigen::VectorXd::Zero(dim);
  d.upper_ = Eigen::VectorXd::Constant(dim, kInf);
  d.finalize();
  return d;
}

PlayerDomain PlayerDomain::polytope(Eigen::MatrixXd Aeq, Eigen::VectorXd beq,
                                    std::vector<bool> nonneg) {
  if (Aeq.rows() != beq.size() || static_cast<Eigen::Index>(nonneg.size()) != Aeq.cols() ||
      Aeq.cols() == 0) {
    throw std::invalid_argument("polytope: inconsistent Aeq/beq/nonneg dimensions");
  }
  PlayerDomain d;
  d.kind_ = DomainKind::Polytope;
  const int n = static_cast<int>(Aeq.cols());
  d.eq_ = std::move(Aeq);
  d.eq_rhs_ = std::move(beq);
  d.lower_.resize(n);
  d.upper_ = Eigen::VectorXd::Constant(n, kInf);
  for (int j = 0; j < n; ++j) d.lower_[j] = nonneg[j] ? 0.0 : -kInf;
  d.finalize();
  return d;
}

void PlayerDomain::finalize() {
  const int n = dim();
  affine_basis_ = null_space(eq_, n);
  range_min_.resize(n);
  range_max_.resize(n);
  if (kind_ == DomainKind::Interval || kind_ == DomainKind::Box) {
    range_min_ = lower_;
    range_max_ = upper_;
    return;
  }
  if (kind_ == DomainKind::Simplex) {
    range_min_.setZero();
    range_max_.setOnes();
    return;
  }
  // Polytope: compactness via LP over each coordinate.
  for (int j = 0; j < n; ++j) {
    for (const double sign : {1.0, -1.0}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c[j] = sign;
      const LpResult r = lp_solve(c, eq_, eq_rhs_, lower_);
      if (r.status == LpStatus::Infeasible) throw std::invalid_argument("polytope is empty");
      if (r.status == LpStatus::Unbounded) throw std::invalid_argument("polytope is unbounded");
      (sign > 0 ? range_max_ : range_min_)[j] = sign * r.value;
    }
  }
}

bool PlayerDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  if (!x.allFinite()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (x[j] < lower_[j] - tol || x[j] > upper_[j] + tol) return false;
  }
  if (eq_.rows() > 0 && (eq_ * x - eq_rhs_).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

double PlayerDomain::ray_length(const Eigen::VectorXd& x, const Eigen::VectorXd& dir) const {
  double t = kInf;
  for (int j = 0; j < dim(); ++j) {
    if (dir[j] < 0 && std::isfinite(lower_[j])) t = std::min(t, (x[j] - lower_[j]) / -dir[j]);
    if (dir[j] > 0 && std::isfinite(upper_[j])) t = std::min(t, (upper_[j] - x[j]) / dir[j]);
  }
  if (kind_ == DomainKind::Simplex || kind_ == DomainKind::Polytope) {
    // Bounded domains: implied upper limits come from the coordinate ranges.
    for (int j = 0; j < dim(); ++j) {
      if (dir[j] > 0) t = std::min(t, (range_max_[j] - x[j]) / dir[j]);
      if (dir[j] < 0) t = std::min(t, (x[j] - range_min_[j]) / -dir[j]);
    }
  }
  return std::max(t, 0.0);
}

Eigen::VectorXd PlayerDomain::center() const {
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box:
      return 0.5 * (lower_ + upper_);
    case DomainKind::Simplex:
      return Eigen::VectorXd::Constant(dim(), 1.0 / dim());
    case DomainKind::Polytope: {
      const int n = dim();
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        for (const double sign : {1.0, -1.0}) {
          Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
          c[j] = sign;
          acc += lp_solve(c, eq_, eq_rhs_, lower_).x;
        }
      }
      return acc / (2.0 * n);
    }
  }
  return {};
}

Eigen::VectorXd PlayerDomain::linear_argmax(const Eigen::VectorXd& c) const {
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box: {
      Eigen::VectorXd x(dim());
      for (int j = 0; j < dim(); ++j) x[j] = c[j] > 0 ? upper_[j] : lower_[j];
      return x;
    }
    case DomainKind::Simplex: {
      Eigen::Index best = 0;
      c.maxCoeff(&best);
      return Eigen::VectorXd::Unit(dim(), best);
    }
    case DomainKind::Polytope: {
      const LpResult r = lp_solve(c, eq_, eq_rhs_, lower_);
      if (r.status != LpStatus::Optimal) throw std::logic_error("polytope LP failed");
      return r.x;
    }
  }
  return {};
}

double PlayerDomain::l1_diameter() const {
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box:
      return (upper_ - lower_).sum();
    case DomainKind::Simplex:
      return dim() == 1 ? 0.0 : 2.0;
    case DomainKind::Polytope:
      return (range_max_ - range_min_).sum();
  }
  return 0.0;
}

bool PlayerDomain::operator==(const PlayerDomain& other) const {
  return kind_ == other.kind_ && eq_.rows() == other.eq_.rows() && eq_.cols() == other.eq_.cols() &&
         eq_ == other.eq_ && eq_rhs_ == other.eq_rhs_ && lower_ == other.lower_ &&
         upper_ == other.upper_;
}

ProductDomain::ProductDomain(std::vector<PlayerDomain> players) : players_(std::move(players)) {
  if (players_.empty()) throw std::invalid_argument("product domain needs at least one player");
  offsets_.reserve(players_.size());
  for (const auto& p : players_) {
    offsets_.push_back(total_dim_);
    total_dim_ += p.dim();
  }
}

bool ProductDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != total_dim_) return false;
  for (int i = 0; i < num_players(); ++i) {
    if (!players_[i].contains(block(x, i), tol)) return false;
  }
  return true;
}

void ProductDomain::require_contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != total_dim_) {
    throw InfeasiblePointError("point has dimension " + std::to_string(x.size()) +
                               ", domain has " + std::to_string(total_dim_));
  }
  if (!contains(x, tol)) throw InfeasiblePointError("point lies outside the action space");
}

std::vector<ActiveBound> active_set(const PlayerDomain& domain, const Eigen::VectorXd& x,
                                    double tol) {
  if (!domain.contains(x, tol)) throw InfeasiblePointError("point lies outside the domain");
  std::vector<ActiveBound> out;
  for (int j = 0; j < domain.dim(); ++j) {
    if (std::isfinite(domain.lower()[j]) && x[j] <= domain.lower()[j] + tol) {
      out.push_back({j, BoundSide::Lower});
    } else if (std::isfinite(domain.upper()[j]) && x[j] >= domain.upper()[j] - tol) {
      out.push_back({j, BoundSide::Upper});
    }
  }
  return out;
}

bool TangentConeRep::contains(const Eigen::VectorXd& z, double tol) const {
  if (z.size() != dim()) return false;
  if (eq.rows() > 0 && (eq * z).cwiseAbs().maxCoeff() > tol) return false;
  for (const auto& a : active) {
    if (a.side == BoundSide::Lower && z[a.index] < -tol) return false;
    if (a.side == BoundSide::Upper && z[a.index] > tol) return false;
  }
  return true;
}

TangentConeRep tangent_cone(const ProductDomain& domain, const Eigen::VectorXd& x, double tol) {
  domain.require_contains(x, tol);
  TangentConeRep cone;
  cone.point = x;
  int rows = 0;
  for (const auto& p : domain.players()) rows += static_cast<int>(p.eq().rows());
  cone.eq = Eigen::MatrixXd::Zero(rows, domain.total_dim());
  int r = 0;
  for (int i = 0; i < domain.num_players(); ++i) {
    const auto& p = domain.player(i);
    const int off = domain.offset(i);
    cone.eq.block(r, off, p.eq().rows(), p.dim()) = p.eq();
    r += static_cast<int>(p.eq().rows());
    for (const auto& a : active_set(p, domain.block(x, i), tol)) {
      cone.active.push_back({off + a.index, a.side});
    }
  }
  return cone;
}

int lineality_dim(const TangentConeRep& cone) {
  const int n = cone.dim();
  Eigen::MatrixXd stacked(cone.eq.rows() + static_cast<Eigen::Index>(cone.active.size()), n);
  stacked.topRows(cone.eq.rows()) = cone.eq;
  for (std::size_t k = 0; k < cone.active.size(); ++k) {
    stacked.row(cone.eq.rows() + k) = Eigen::RowVectorXd::Unit(n, cone.active[k].index);
  }
  return n - matrix_rank(stacked);
}

std::vector<Eigen::VectorXd> cone_generators(const TangentConeRep& cone, long budget) {
  const int n = cone.dim();
  const Eigen::MatrixXd basis = null_space(cone.eq, n);  // z = basis * t
  const int k = static_cast<int>(basis.cols());
  std::vector<Eigen::VectorXd> gens;
  if (k == 0) return gens;

  const int a = static_cast<int>(cone.active.size());
  Eigen::MatrixXd c(a, k);  // cone in t-coordinates: c t >= 0
  for (int i = 0; i < a; ++i) {
    const double s = cone.active[i].side == BoundSide::Lower ? 1.0 : -1.0;
    c.row(i) = s * basis.row(cone.active[i].index);
  }

  const Eigen::MatrixXd lineality = null_space(c, k);
  const int l = static_cast<int>(lineality.cols());
  auto push_unit = [&gens](Eigen::VectorXd z) {
    z.normalize();
    for (const auto& g : gens) {
      if ((g - z).cwiseAbs().maxCoeff() < 1e-9) return;
    }
    gens.push_back(std::move(z));
  };
  for (int j = 0; j < l; ++j) {
    push_unit(basis * lineality.col(j));
    push_unit(-(basis * lineality.col(j)));
  }

  const int rank = k - l;
  if (rank == 0) return gens;
  const int choose = rank - 1;
  if (binomial(a, choose) > static_cast<double>(budget)) {
    throw UnsupportedError("cone generator enumeration exceeds budget");
  }
  std::vector<int> idx(choose);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    Eigen::MatrixXd sys(choose + l, k);
    for (int i = 0; i < choose; ++i) sys.row(i) = c.row(idx[i]);
    if (l > 0) sys.bottomRows(l) = lineality.transpose();
    const Eigen::MatrixXd dir = null_space(sys, k);
    if (dir.cols() != 1) continue;
    Eigen::VectorXd d = dir.col(0);
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c * d).minCoeff() < -1e-9 * scale) d = -d;
    if ((c * d).minCoeff() < -1e-9 * scale) continue;
    push_unit(basis * d);
  } while (next_combination(idx, a));
  return gens;
}

MarginResult robustness_margin(const Eigen::VectorXd& gradient, const TangentConeRep& cone) {
  const int n = cone.dim();
  if (gradient.size() != n) throw std::invalid_argument("gradient/cone dimension mismatch");

  std::vector<bool> allow_plus(n, true), allow_minus(n, true);
  for (const auto& a : cone.active) {
    if (a.side == BoundSide::Lower) allow_minus[a.index] = false;
    else allow_plus[a.index] = false;
  }
  // Columns: one per allowed (coordinate, sign).
  std::vector<std::pair<int, double>> cols;
  for (int j = 0; j < n; ++j) {
    if (allow_plus[j]) cols.emplace_back(j, 1.0);
    if (allow_minus[j]) cols.emplace_back(j, -1.0);
  }
  const int m = static_cast<int>(cone.eq.rows());
  const int nv = static_cast<int>(cols.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, nv);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  Eigen::VectorXd obj(nv);
  for (int v = 0; v < nv; ++v) {
    const auto [j, s] = cols[v];
    if (m > 0) A.col(v).head(m) = s * cone.eq.col(j);
    A(m, v) = 1.0;
    obj[v] = s * gradient[j];
  }
  b[m] = 1.0;

  const LpResult r = lp_solve(obj, A, b);
  if (r.status == LpStatus::Infeasible) {
    return {std::numeric_limits<double>::infinity(), Eigen::VectorXd()};
  }
  if (r.status != LpStatus::Optimal) throw std::logic_error("robustness LP is unbounded");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < nv; ++v) z[cols[v].first] += cols[v].second * r.x[v];
  // The split lets z+ and z- cancel, so the LP maximizes over the l1 ball
  // rather than the sphere. A positive optimum sits on the sphere and is
  // exact; otherwise the sphere maximum is attained at an extreme ray.
  const double scale = std::max(1.0, gradient.cwiseAbs().maxCoeff());
  if (r.value > 1e-12 * scale) return {-r.value, z};

  MarginResult best{std::numeric_limits<double>::infinity(), Eigen::VectorXd()};
  for (const auto& g : cone_generators(cone)) {
    const Eigen::VectorXd u = g / g.lpNorm<1>();
    const double m = -gradient.dot(u);
    if (m < best.margin) best = {m, u};
  }
  return best;
}

}  // namespace robeq
