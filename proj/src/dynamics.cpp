#include "robeq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robeq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates SPSA from its first admissible radius; other oracles unchanged.
long oracle_index(const OracleSpec& oracle, long n) {
  if (const auto* s = std::get_if<SpsaOracle>(&oracle)) return std::max(n, s->n_min());
  return n;
}

bool should_record(const RunConfig& cfg, long n) {
  return (n - 1) % cfg.thinning == 0 || n == cfg.horizon;
}

// Clamps to +/-kDualClamp; returns false on NaN.
bool sanitize(Eigen::VectorXd& y, bool& saturated) {
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (std::isnan(y[j])) return false;
    if (std::abs(y[j]) > kDualClamp) {
      y[j] = std::copysign(kDualClamp, y[j]);
      saturated = true;
    }
  }
  return true;
}

void record(Trajectory& t, const RunConfig& cfg, long n, const Eigen::VectorXd& x,
            const Eigen::VectorXd& y, double delta, double gamma) {
  const double d = cfg.reference ? distance(x, *cfg.reference, cfg.norm) : kNaN;
  t.points.push_back({n, x, y, d, delta, gamma});
}

Trajectory start(const RunConfig& cfg) {
  Trajectory t;
  t.seed = cfg.seed;
  t.config = cfg;
  t.points.reserve(static_cast<std::size_t>(cfg.horizon / cfg.thinning + 2));
  return t;
}

}  // namespace

double step_value(const StepSchedule& schedule, long n) {
  if (const auto* c = std::get_if<ConstantStep>(&schedule)) return c->gamma;
  const auto& p = std::get<PowerStep>(schedule);
  return p.gamma0 / std::pow(static_cast<double>(n), p.p);
}

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, DistanceNorm norm) {
  switch (norm) {
    case DistanceNorm::L1: return (a - b).lpNorm<1>();
    case DistanceNorm::L2: return (a - b).norm();
    case DistanceNorm::Linf: return (a - b).lpNorm<Eigen::Infinity>();
  }
  return kNaN;
}

void validate_run_config(const RunConfig& cfg, const ProductDomain& domain) {
  if (cfg.horizon < 1) throw std::invalid_argument("run.horizon must be >= 1");
  if (cfg.thinning < 1) throw std::invalid_argument("run.thinning must be >= 1");
  if (const auto* c = std::get_if<ConstantStep>(&cfg.step)) {
    if (!(c->gamma > 0)) throw std::invalid_argument("run.step: gamma must be positive");
  } else {
    const auto& p = std::get<PowerStep>(cfg.step);
    if (!(p.gamma0 > 0)) throw std::invalid_argument("run.step: gamma0 must be positive");
    if (!(p.p >= 0 && p.p <= 1)) throw std::invalid_argument("run.step: p must lie in [0, 1]");
  }
  if (const auto* d = std::get_if<DualInit>(&cfg.init)) {
    if (d->y.size() != domain.total_dim() || !d->y.allFinite()) {
      throw std::invalid_argument("run.init: dual point has the wrong dimension");
    }
    if (cfg.algorithm == Algorithm::MD) {
      throw std::invalid_argument("run.init: mirror descent needs a primal initial point");
    }
  } else {
    const auto& x = std::get<PrimalInit>(cfg.init).x;
    if (!domain.contains(x, 1e-9)) throw std::invalid_argument("run.init: primal point is infeasible");
  }
  if (cfg.reference && cfg.reference->size() != domain.total_dim()) {
    throw std::invalid_argument("reference point has the wrong dimension");
  }
}

Trajectory run_ftrl(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
                    const RunConfig& cfg, const StepObserver& observer) {
  const auto& dom = game.domain();
  validate_pairs(reg, dom);
  validate_oracle(oracle, dom);
  RunConfig c = cfg;
  c.algorithm = Algorithm::FTRL;
  validate_run_config(c, dom);

  Eigen::VectorXd y = std::holds_alternative<DualInit>(cfg.init)
                          ? std::get<DualInit>(cfg.init).y
                          : grad_h(reg, dom, std::get<PrimalInit>(cfg.init).x);
  // Neumaier compensation term for the running dual sum.
  Eigen::VectorXd comp = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd sum = y;

  Trajectory t = start(c);
  FeedbackStreams streams(cfg.seed, cfg.run_index, dom.num_players());
  Eigen::VectorXd x, y_played;
  for (long n = 1; n <= cfg.horizon; ++n) {
    x = mirror(reg, dom, y);
    y_played = y;
    const double gamma = step_value(cfg.step, n);
    const FeedbackSample fb = sample_feedback(oracle, game, x, oracle_index(oracle, n), streams);
    if (should_record(c, n)) record(t, c, n, x, y, fb.delta, gamma);
    if (observer) observer(n, x, y);
    if (!fb.signal.allFinite()) {
      t.status = RunStatus::Diverged;
      break;
    }
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double inc = gamma * fb.signal[j];
      const double s = sum[j] + inc;
      comp[j] += std::abs(sum[j]) >= std::abs(inc) ? (sum[j] - s) + inc : (inc - s) + sum[j];
      sum[j] = s;
      y[j] = s + comp[j];
    }
    if (!sanitize(y, t.saturated)) {
      t.status = RunStatus::Diverged;
      break;
    }
    if (t.saturated) {
      sum = y;
      comp.setZero();
    }
  }
  t.final_x = x;
  t.final_y = y_played;
  return t;
}

Trajectory run_md(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
                  const RunConfig& cfg, const StepObserver& observer) {
  if (reg.all_steep()) {
    RunConfig c = cfg;
    if (const auto* p = std::get_if<PrimalInit>(&cfg.init)) c.init = DualInit{grad_h(reg, game.domain(), p->x)};
    Trajectory t = run_ftrl(game, reg, oracle, c, observer);
    t.config.algorithm = Algorithm::MD;
    return t;
  }
  const auto& dom = game.domain();
  validate_pairs(reg, dom);
  validate_oracle(oracle, dom);
  RunConfig c = cfg;
  c.algorithm = Algorithm::MD;
  validate_run_config(c, dom);

  Eigen::VectorXd x = std::get<PrimalInit>(cfg.init).x;
  Eigen::VectorXd y = grad_h(reg, dom, x);
  Trajectory t = start(c);
  FeedbackStreams streams(cfg.seed, cfg.run_index, dom.num_players());
  for (long n = 1; n <= cfg.horizon; ++n) {
    const double gamma = step_value(cfg.step, n);
    const FeedbackSample fb = sample_feedback(oracle, game, x, oracle_index(oracle, n), streams);
    if (should_record(c, n)) record(t, c, n, x, y, fb.delta, gamma);
    if (observer) observer(n, x, y);
    if (n == cfg.horizon) break;
    y = grad_h(reg, dom, x) + gamma * fb.signal;
    if (!sanitize(y, t.saturated)) {
      t.status = RunStatus::Diverged;
      break;
    }
    x = mirror(reg, dom, y);
  }
  t.final_x = x;
  t.final_y = y;
  return t;
}

Trajectory run(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
               const RunConfig& cfg, const StepObserver& observer) {
  return cfg.algorithm == Algorithm::FTRL ? run_ftrl(game, reg, oracle, cfg, observer)
                                          : run_md(game, reg, oracle, cfg, observer);
}

}  // namespace robeq
