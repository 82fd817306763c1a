#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace robeq {

class InfeasiblePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DomainKind { Interval, Box, Simplex, Polytope };

std::string to_string(DomainKind kind);

// A compact polyhedral action set in the normalized form
//   { x : eq * x = eq_rhs, lower <= x <= upper }
// where bounds may be infinite. Catalog kinds keep their parameters so that
// closed-form mirror maps and samplers can dispatch on them.
class PlayerDomain {
 public:
  static PlayerDomain interval(double lo, double hi);
  static PlayerDomain box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static PlayerDomain simplex(int d);
  // Polytope { x : Aeq x = beq, x_j >= 0 for nonneg[j] }. Must be nonempty
  // and bounded; both are checked with the LP solver.
  static PlayerDomain polytope(Eigen::MatrixXd Aeq, Eigen::VectorXd beq,
                               std::vector<bool> nonneg);

  DomainKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lower_.size()); }
  int affine_dim() const { return static_cast<int>(affine_basis_.cols()); }

  const Eigen::MatrixXd& eq() const { return eq_; }
  const Eigen::VectorXd& eq_rhs() const { return eq_rhs_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  // Orthonormal basis (columns) of the direction space of the affine hull.
  const Eigen::MatrixXd& affine_basis() const { return affine_basis_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  // Largest t >= 0 with x + t*dir inside the domain (x assumed feasible).
  double ray_length(const Eigen::VectorXd& x, const Eigen::VectorXd& dir) const;

  // Barycenter for simplices, midpoint for intervals and boxes, average of
  // coordinate-extreme vertices for general polytopes.
  Eigen::VectorXd center() const;

  // argmax of <c, x> over the domain (closed form for catalog kinds, LP for
  // polytopes).
  Eigen::VectorXd linear_argmax(const Eigen::VectorXd& c) const;
  double support(const Eigen::VectorXd& c) const { return c.dot(linear_argmax(c)); }

  // l1 diameter. Exact for catalog kinds, an upper bound for polytopes.
  double l1_diameter() const;

  // Coordinate ranges [min x_j, max x_j] over the domain.
  const Eigen::VectorXd& range_min() const { return range_min_; }
  const Eigen::VectorXd& range_max() const { return range_max_; }

  bool operator==(const PlayerDomain& other) const;

 private:
  PlayerDomain() = default;
  void finalize();

  DomainKind kind_ = DomainKind::Interval;
  Eigen::MatrixXd eq_;
  Eigen::VectorXd eq_rhs_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::MatrixXd affine_basis_;
  Eigen::VectorXd range_min_;
  Eigen::VectorXd range_max_;
};

// Joint action space; joint points are concatenations of player blocks.
class ProductDomain {
 public:
  ProductDomain() = default;
  explicit ProductDomain(std::vector<PlayerDomain> players);

  int num_players() const { return static_cast<int>(players_.size()); }
  int total_dim() const { return total_dim_; }
  const PlayerDomain& player(int i) const { return players_.at(i); }
  const std::vector<PlayerDomain>& players() const { return players_; }
  int offset(int i) const { return offsets_.at(i); }

  auto block(Eigen::VectorXd& x, int i) const {
    return x.segment(offsets_[i], players_[i].dim());
  }
  auto block(const Eigen::VectorXd& x, int i) const {
    return x.segment(offsets_[i], players_[i].dim());
  }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  void require_contains(const Eigen::VectorXd& x, double tol) const;

  bool operator==(const ProductDomain& other) const { return players_ == other.players_; }

 private:
  std::vector<PlayerDomain> players_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

enum class BoundSide { Lower, Upper };

struct ActiveBound {
  int index;
  BoundSide side;
  bool operator==(const ActiveBound&) const = default;
};

// Bounds of `domain` active at x (local indices). Throws InfeasiblePointError
// if x is not in the domain within tol.
std::vector<ActiveBound> active_set(const PlayerDomain& domain, const Eigen::VectorXd& x,
                                    double tol);

// { z : eq z = 0, z_j >= 0 for lower-active j, z_j <= 0 for upper-active j }
struct TangentConeRep {
  Eigen::MatrixXd eq;
  std::vector<ActiveBound> active;  // joint indices
  Eigen::VectorXd point;

  int dim() const { return static_cast<int>(point.size()); }
  bool contains(const Eigen::VectorXd& z, double tol = 1e-9) const;
};

TangentConeRep tangent_cone(const ProductDomain& domain, const Eigen::VectorXd& x, double tol);

// Dimension of the largest subspace inside the cone. Zero iff the base point
// is an extreme point of the domain.
int lineality_dim(const TangentConeRep& cone);

// Finite set of unit vectors whose nonnegative combinations give the cone:
// +/- a basis of the lineality space plus the extreme rays of the pointed
// part. Throws UnsupportedError when the ray enumeration exceeds `budget`
// candidate subsets.
std::vector<Eigen::VectorXd> cone_generators(const TangentConeRep& cone, long budget = 200000);

struct MarginResult {
  double margin;            // +inf when the cone is {0}
  Eigen::VectorXd witness;  // empty when the cone is {0}
};

// margin = -max { <gradient, z> : z in cone, |z|_1 = 1 }. An LP over the
// split z = z+ - z- settles the non-stationary case; otherwise the maximum
// is taken over the l1-normalized cone generators (same budget rules).
MarginResult robustness_margin(const Eigen::VectorXd& gradient, const TangentConeRep& cone);

// Orthonormal basis of the null space of m (columns); identity when m has no rows.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, int cols);

}  // namespace robeq
