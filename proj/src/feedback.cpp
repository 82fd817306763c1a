#include "robeq/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robeq {
namespace {

constexpr double kFeasTol = 1e-12;

void validate_spsa(const SpsaOracle& o, const ProductDomain& domain) {
  const int players = domain.num_players();
  if (static_cast<int>(o.pivots.size()) != players || static_cast<int>(o.radii.size()) != players) {
    throw std::invalid_argument("spsa: one pivot and one radius per player required");
  }
  if (!(o.rho > 0.0 && o.rho < 0.5)) throw std::invalid_argument("spsa: rho must lie in (0, 1/2)");
  if (!(o.delta0 > 0.0)) throw std::invalid_argument("spsa: delta0 must be positive");
  for (int i = 0; i < players; ++i) {
    const auto& d = domain.player(i);
    const auto& p = o.pivots[i];
    if (p.size() != d.dim() || !d.contains(p, kFeasTol)) {
      throw std::invalid_argument("spsa: pivot of player " + std::to_string(i) +
                                  " lies outside the domain");
    }
    for (int j = 0; j < d.dim(); ++j) {
      const bool on_lower = std::isfinite(d.lower()[j]) && p[j] <= d.lower()[j] + kFeasTol;
      const bool on_upper = std::isfinite(d.upper()[j]) && p[j] >= d.upper()[j] - kFeasTol;
      if (on_lower || on_upper) {
        throw std::invalid_argument("spsa: pivot of player " + std::to_string(i) +
                                    " is not in the relative interior");
      }
    }
    if (!(o.radii[i] > 0.0)) throw std::invalid_argument("spsa: radii must be positive");
    const auto& basis = d.affine_basis();
    for (int k = 0; k < basis.cols(); ++k) {
      for (const double s : {1.0, -1.0}) {
        if (!d.contains(p + o.radii[i] * s * basis.col(k), kFeasTol)) {
          throw std::invalid_argument("spsa: pivot + radius * direction leaves the domain for player " +
                                      std::to_string(i));
        }
      }
    }
  }
}

}  // namespace

SfoOracle SfoOracle::gaussian(double sigma) {
  SfoOracle o;
  o.noise = Noise::Gaussian;
  o.sigma = sigma;
  return o;
}

SfoOracle SfoOracle::gaussian_covariance(const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sfo: covariance must be symmetric positive definite");
  }
  SfoOracle o;
  o.noise = Noise::Gaussian;
  o.sigma = 1.0;
  o.cov_factor = llt.matrixL();
  return o;
}

SfoOracle SfoOracle::rademacher(double sigma) {
  SfoOracle o;
  o.noise = Noise::Rademacher;
  o.sigma = sigma;
  return o;
}

double SpsaOracle::delta(long n) const {
  return delta0 / std::pow(static_cast<double>(n), rho);
}

long SpsaOracle::n_min() const {
  const double r = *std::min_element(radii.begin(), radii.end());
  long n = 1;
  if (delta0 >= r) n = static_cast<long>(std::floor(std::pow(delta0 / r, 1.0 / rho)));
  n = std::max(n - 1, 1L);
  while (delta(n) >= r) ++n;
  return n;
}

std::string oracle_name(const OracleSpec& oracle) {
  if (std::holds_alternative<PerfectOracle>(oracle)) return "perfect";
  if (const auto* s = std::get_if<SfoOracle>(&oracle)) {
    return s->noise == SfoOracle::Noise::Gaussian ? "sfo_gaussian" : "sfo_rademacher";
  }
  return "spsa";
}

SpsaOracle make_spsa(const ProductDomain& domain, double delta0, double rho,
                     std::optional<std::vector<Eigen::VectorXd>> pivots,
                     std::optional<std::vector<double>> radii) {
  SpsaOracle o;
  o.delta0 = delta0;
  o.rho = rho;
  if (pivots) {
    o.pivots = *pivots;
  } else {
    for (const auto& d : domain.players()) o.pivots.push_back(d.center());
  }
  if (radii) {
    o.radii = *radii;
  } else {
    for (int i = 0; i < domain.num_players(); ++i) {
      const auto& d = domain.player(i);
      if (i >= static_cast<int>(o.pivots.size())) break;
      double reach = std::numeric_limits<double>::infinity();
      for (int k = 0; k < d.affine_basis().cols(); ++k) {
        reach = std::min(reach, d.ray_length(o.pivots[i], d.affine_basis().col(k)));
        reach = std::min(reach, d.ray_length(o.pivots[i], -d.affine_basis().col(k)));
      }
      o.radii.push_back(0.5 * reach);
    }
  }
  validate_spsa(o, domain);
  return o;
}

void validate_oracle(const OracleSpec& oracle, const ProductDomain& domain) {
  if (const auto* s = std::get_if<SfoOracle>(&oracle)) {
    if (!(s->sigma >= 0.0) || !std::isfinite(s->sigma)) {
      throw std::invalid_argument("sfo: sigma must be finite and nonnegative");
    }
    if (s->cov_factor.size() > 0 && (s->cov_factor.rows() != domain.total_dim() ||
                                     s->cov_factor.cols() != domain.total_dim())) {
      throw std::invalid_argument("sfo: covariance dimension does not match the action space");
    }
  } else if (const auto* p = std::get_if<SpsaOracle>(&oracle)) {
    validate_spsa(*p, domain);
  }
}

FeedbackStreams::FeedbackStreams(std::uint64_t seed, std::uint64_t run, int num_players) {
  for (int i = 0; i < num_players; ++i) {
    streams_.push_back({CounterRng::stream(seed, run, static_cast<std::uint64_t>(i)), {}});
  }
}

FeedbackSample spsa_sample(const SpsaOracle& o, const Game& game, const Eigen::VectorXd& x,
                           double delta, FeedbackStreams& streams) {
  const auto& dom = game.domain();
  FeedbackSample s;
  s.delta = delta;
  s.queried_point.resize(dom.total_dim());
  s.directions.resize(dom.num_players());
  for (int i = 0; i < dom.num_players(); ++i) {
    const auto& basis = dom.player(i).affine_basis();
    const auto dirs = static_cast<std::uint64_t>(basis.cols());
    const std::uint64_t pick = streams.rng(i)() % (2 * dirs);
    Eigen::VectorXd w = basis.col(static_cast<Eigen::Index>(pick / 2));
    if (pick % 2 == 1) w = -w;
    const double t = delta / o.radii[i];
    dom.block(s.queried_point, i) = dom.block(x, i) + t * (o.pivots[i] - dom.block(x, i)) + delta * w;
    s.directions[i] = std::move(w);
  }
  s.signal.resize(dom.total_dim());
  for (int i = 0; i < dom.num_players(); ++i) {
    const double scale = dom.player(i).affine_dim() / delta;
    dom.block(s.signal, i) = scale * game.payoff(i, s.queried_point) * s.directions[i];
  }
  return s;
}

FeedbackSample sample_feedback(const OracleSpec& oracle, const Game& game,
                               const Eigen::VectorXd& x, long n, FeedbackStreams& streams) {
  if (n < 1) throw std::invalid_argument("sample_feedback: step index must be >= 1");
  const auto& dom = game.domain();
  if (const auto* spsa = std::get_if<SpsaOracle>(&oracle)) {
    const double delta = spsa->delta(n);
    const double rmin = *std::min_element(spsa->radii.begin(), spsa->radii.end());
    if (delta >= rmin) {
      throw ScheduleError("spsa: delta_n = " + std::to_string(delta) +
                          " is not below the smallest radius at n = " + std::to_string(n) +
                          " (first valid index " + std::to_string(spsa->n_min()) + ")");
    }
    return spsa_sample(*spsa, game, x, delta, streams);
  }
  FeedbackSample s;
  s.queried_point = x;
  s.signal = game.field(x);
  if (const auto* sfo = std::get_if<SfoOracle>(&oracle)) {
    Eigen::VectorXd xi(dom.total_dim());
    for (int i = 0; i < dom.num_players(); ++i) {
      const int off = dom.offset(i);
      for (int j = 0; j < dom.player(i).dim(); ++j) {
        if (sfo->noise == SfoOracle::Noise::Gaussian) {
          xi[off + j] = streams.normal(i);
        } else {
          xi[off + j] = (streams.rng(i)() >> 63) ? 1.0 : -1.0;
        }
      }
    }
    if (sfo->cov_factor.size() > 0) s.signal += sfo->cov_factor * xi;
    else s.signal += sfo->sigma * xi;
  }
  return s;
}

SpsaStatistics spsa_statistics(const SpsaOracle& oracle, const Game& game,
                               const Eigen::VectorXd& x, double delta, long draws,
                               FeedbackStreams& streams) {
  SpsaStatistics st;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(game.domain().total_dim());
  for (long k = 0; k < draws; ++k) {
    const FeedbackSample s = spsa_sample(oracle, game, x, delta, streams);
    sum += s.signal;
    st.max_norm = std::max(st.max_norm, s.signal.cwiseAbs().maxCoeff());
  }
  st.bias = sum / static_cast<double>(draws) - game.field(x);
  return st;
}

Eigen::VectorXd empirical_bias(const SpsaOracle& oracle, const Game& game,
                               const Eigen::VectorXd& x, double delta, long draws,
                               FeedbackStreams& streams) {
  return spsa_statistics(oracle, game, x, delta, draws, streams).bias;
}

}  // namespace robeq
