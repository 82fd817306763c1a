#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robeq/domain.hpp"

namespace robeq {

class SteepnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel theta of a decomposable regularizer h(x) = sum_j theta(x_j - lo_j).
// theta_prime_inv is clamped to the endpoints of its range: arguments at or
// below theta'(0+) map to 0, arguments above sup theta' map to +inf.
struct Kernel {
  std::string name;
  std::function<double(double)> theta;
  std::function<double(double)> theta_prime;
  std::function<double(double)> theta_prime_inv;
  double theta_prime_at_zero = 0.0;  // -inf for steep kernels

  bool steep() const;

  static Kernel entropic();   // z log z
  static Kernel sqrt_kernel();  // -2 sqrt(z)
  static Kernel quadratic();  // z^2 / 2
};

struct PlayerRegularizer {
  enum class Kind { Quadratic, Kernel };
  Kind kind = Kind::Quadratic;
  Kernel kernel;

  static PlayerRegularizer euclidean();
  static PlayerRegularizer with_kernel(Kernel k);
  // "euclidean" | "entropic" | "sqrt"
  static PlayerRegularizer named(const std::string& name);

  std::string name() const;
  bool steep() const { return kind == Kind::Kernel && kernel.steep(); }
};

class RegularizerSpec {
 public:
  RegularizerSpec() = default;
  explicit RegularizerSpec(std::vector<PlayerRegularizer> per_player)
      : per_player_(std::move(per_player)) {}
  static RegularizerSpec uniform(const PlayerRegularizer& r, int num_players) {
    return RegularizerSpec(std::vector<PlayerRegularizer>(num_players, r));
  }

  const PlayerRegularizer& player(int i) const { return per_player_.at(i); }
  int num_players() const { return static_cast<int>(per_player_.size()); }
  bool all_steep() const;

 private:
  std::vector<PlayerRegularizer> per_player_;
};

// Throws UnsupportedError if some (regularizer, domain) pair has no
// closed-form mirror map.
void validate_pairs(const RegularizerSpec& reg, const ProductDomain& domain);

// Q(y) = argmax_{x in X} <y, x> - h(x), player by player in closed form.
Eigen::VectorXd mirror(const RegularizerSpec& reg, const ProductDomain& domain,
                       const Eigen::VectorXd& y);

// Grid search of the same argmax over a lattice of spacing grid_step. Test
// oracle; every player must have ambient dimension <= 3.
Eigen::VectorXd mirror_bruteforce(const RegularizerSpec& reg, const ProductDomain& domain,
                                  const Eigen::VectorXd& y, double grid_step);

// h_i(x_i) for one player; used by the brute-force oracle.
double regularizer_value(const PlayerRegularizer& r, const PlayerDomain& d,
                         const Eigen::VectorXd& x);

// A selection of the subdifferential of h; mirror(grad_h(x)) == x on the
// image of Q. Throws SteepnessError on the boundary under steep kernels.
Eigen::VectorXd grad_h(const RegularizerSpec& reg, const ProductDomain& domain,
                       const Eigen::VectorXd& x);

// psi(z) = (theta')^{-1}(z) above theta'(0+), zero below.
double rate_function(const Kernel& kernel, double z);

// Euclidean projection onto the probability simplex (sort based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

}  // namespace robeq
