#pragma once

#include <limits>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "robeq/game.hpp"
#include "robeq/rng.hpp"

namespace robeq {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PerfectOracle {};

// Stochastic first-order oracle: V(x) + xi with zero-mean sub-Gaussian xi.
struct SfoOracle {
  enum class Noise { Gaussian, Rademacher };
  Noise noise = Noise::Gaussian;
  double sigma = 1.0;
  // Lower Cholesky factor of a joint covariance; empty means sigma * I.
  Eigen::MatrixXd cov_factor;

  static SfoOracle gaussian(double sigma);
  static SfoOracle gaussian_covariance(const Eigen::MatrixXd& covariance);
  static SfoOracle rademacher(double sigma);
};

// Single-point payoff-based estimator with pivot-based feasibility adjustment
// and sampling radius delta_n = delta0 / n^rho.
struct SpsaOracle {
  std::vector<Eigen::VectorXd> pivots;
  std::vector<double> radii;
  double delta0 = 0.1;
  double rho = 0.25;

  double delta(long n) const;
  // First index with delta_n < min_i r_i.
  long n_min() const;
};

using OracleSpec = std::variant<PerfectOracle, SfoOracle, SpsaOracle>;

std::string oracle_name(const OracleSpec& oracle);

// Fills default pivots (domain centers) and radii (half the distance from the
// pivot to the boundary along the affine basis) where not given, then
// validates.
SpsaOracle make_spsa(const ProductDomain& domain, double delta0, double rho,
                     std::optional<std::vector<Eigen::VectorXd>> pivots = std::nullopt,
                     std::optional<std::vector<double>> radii = std::nullopt);

// Throws std::invalid_argument when the oracle is inconsistent with the domain.
void validate_oracle(const OracleSpec& oracle, const ProductDomain& domain);

// One random stream per player of one run.
class FeedbackStreams {
 public:
  FeedbackStreams(std::uint64_t seed, std::uint64_t run, int num_players);

  CounterRng& rng(int player) { return streams_.at(player).rng; }
  double normal(int player) {
    auto& s = streams_.at(player);
    return s.normal(s.rng);
  }

 private:
  struct Stream {
    CounterRng rng;
    std::normal_distribution<double> normal;
  };
  std::vector<Stream> streams_;
};

struct FeedbackSample {
  Eigen::VectorXd signal;
  Eigen::VectorXd queried_point;
  double delta = std::numeric_limits<double>::quiet_NaN();  // SPSA only
  std::vector<Eigen::VectorXd> directions;  // SPSA only
};

FeedbackSample sample_feedback(const OracleSpec& oracle, const Game& game,
                               const Eigen::VectorXd& x, long n, FeedbackStreams& streams);

// The SPSA estimate with the sampling radius pinned to `delta`.
FeedbackSample spsa_sample(const SpsaOracle& oracle, const Game& game, const Eigen::VectorXd& x,
                           double delta, FeedbackStreams& streams);

struct SpsaStatistics {
  Eigen::VectorXd bias;     // mean(v_hat) - V(x)
  double max_norm = 0.0;    // max |v_hat|_inf over draws
};

SpsaStatistics spsa_statistics(const SpsaOracle& oracle, const Game& game,
                               const Eigen::VectorXd& x, double delta, long draws,
                               FeedbackStreams& streams);

Eigen::VectorXd empirical_bias(const SpsaOracle& oracle, const Game& game,
                               const Eigen::VectorXd& x, double delta, long draws,
                               FeedbackStreams& streams);

}  // namespace robeq
