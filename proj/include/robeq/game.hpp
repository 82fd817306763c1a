#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "robeq/domain.hpp"

namespace robeq {

// Payoff u_i evaluated at a joint action profile.
using PayoffFn = std::function<double(const Eigen::VectorXd&)>;
// Individual gradient V_i(x) = grad_{x_i} u_i(x), returned as player i's block.
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable continuous game. Players without an analytic gradient fall back
// to central finite differences (one-sided at the boundary).
class Game {
 public:
  Game(ProductDomain domain, std::vector<PayoffFn> payoffs, std::vector<GradFn> grads,
       std::string label);

  const ProductDomain& domain() const { return impl_->domain; }
  int num_players() const { return impl_->domain.num_players(); }
  const std::string& label() const { return impl_->label; }

  double payoff(int i, const Eigen::VectorXd& x) const { return impl_->payoffs.at(i)(x); }
  Eigen::VectorXd grad(int i, const Eigen::VectorXd& x) const;
  Eigen::VectorXd fd_grad(int i, const Eigen::VectorXd& x) const;
  bool has_analytic_grad(int i) const { return static_cast<bool>(impl_->grads.at(i)); }

  // V(x) without a feasibility check.
  Eigen::VectorXd field(const Eigen::VectorXd& x) const;

  static constexpr double kFdStep = 1e-5;

 private:
  struct Impl {
    ProductDomain domain;
    std::vector<PayoffFn> payoffs;
    std::vector<GradFn> grads;
    std::string label;
  };
  std::shared_ptr<const Impl> impl_;
};

struct CatalogSpec {
  std::string id;
  std::map<std::string, double> params;
};

// Mixed extension of a two-player bimatrix game on simplex x simplex:
// u1 = x1' A1 x2, u2 = x1' A2 x2.
struct BimatrixSpec {
  Eigen::MatrixXd A1;
  Eigen::MatrixXd A2;
};

using GameSpec = std::variant<CatalogSpec, BimatrixSpec>;

// Catalog ids: "boundary_quartic", "linear_interval" (param slope, default 1),
// "interior_quadratic" (param c, default 0.5), "zero", "coordination".
Game make_game(const GameSpec& spec);
std::vector<std::string> catalog_ids();

// Reads {"A1": [[..]], "A2": [[..]]}.
BimatrixSpec load_bimatrix(const std::string& path);

// V(x) with a feasibility check.
Eigen::VectorXd gradient_field(const Game& game, const Eigen::VectorXd& x, double tol = 1e-9);

// max_{x in X} <V(x*), x - x*>, computed exactly player by player. Zero at a
// solution of the variational inequality.
double vi_gap(const Game& game, const Eigen::VectorXd& x);

// Quasi-random feasible points: a randomly shifted Halton sequence mapped to
// each player's domain. Deterministic given `seed`.
std::vector<Eigen::VectorXd> sample_points(const ProductDomain& domain, int count,
                                           std::uint64_t seed);

// Sampled lower bound on sup_x |V(x) - V'(x)|_inf over `samples` quasi-random
// points plus any anchors.
double game_distance(const Game& g, const Game& h, int samples, std::uint64_t seed,
                     const std::vector<Eigen::VectorXd>& anchors = {});

// Sampled lower bound on max_i sup_x |u_i(x) - u'_i(x)|.
double uniform_payoff_distance(const Game& g, const Game& h, int samples, std::uint64_t seed,
                               const std::vector<Eigen::VectorXd>& anchors = {});

// u~_i = u_i - eps exp(2/eps <V_i(x*), x_i - x*_i>). Requires V_i(x*) != 0 and
// a deviation p_i with <V_i(x*), p_i - x*_i> < 0.
Game perturb_collapse1(const Game& g, int player, const Eigen::VectorXd& xstar, double eps);

// u~_i = u_i + eps / (diam(X_i) |y|_inf) <y, x_i - x*_i>. Requires
// <V(x*), x - x*> = 0 on X and some p_i with <y, p_i - x*_i> > 0.
Game perturb_collapse2(const Game& g, int player, const Eigen::VectorXd& xstar, double eps,
                       const Eigen::VectorXd& y);

// Adds a constant vector to the gradient field (payoffs gain the matching
// linear term). Used to probe strategic robustness.
Game perturb_constant(const Game& g, const Eigen::VectorXd& shift);

}  // namespace robeq
