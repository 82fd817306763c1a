#include "robeq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robeq {
namespace {

constexpr double kWilsonZ = 1.959963984540054;

}  // namespace

long ConvergenceCriterion::window_start(long horizon) const {
  return static_cast<long>(std::floor(static_cast<double>(horizon) * (1.0 - window_frac)));
}

void validate_criterion(const ConvergenceCriterion& crit, const ProductDomain& domain) {
  if (crit.reference.size() != domain.total_dim()) {
    throw std::invalid_argument("reference: dimension does not match the action space");
  }
  if (!domain.contains(crit.reference, 1e-9)) throw std::invalid_argument("reference: point is infeasible");
  if (!(crit.eps_conv >= 0.0)) throw std::invalid_argument("analysis.eps_conv must be nonnegative");
  if (!(crit.window_frac > 0.0 && crit.window_frac <= 1.0)) {
    throw std::invalid_argument("analysis.window_frac must lie in (0, 1]");
  }
}

bool classify_convergence(const Trajectory& traj, const ConvergenceCriterion& crit) {
  if (!traj.config.reference) {
    throw std::invalid_argument("classify_convergence: trajectory has no reference distances");
  }
  if (traj.status == RunStatus::Diverged) return false;
  const long start = crit.window_start(traj.horizon());
  bool any = false;
  for (const auto& p : traj.points) {
    if (p.n <= start) continue;
    any = true;
    if (!(p.dist_ref == 0.0 || p.dist_ref <= crit.eps_conv)) return false;
  }
  return any;
}

WilsonInterval wilson_interval(long k, long m) {
  if (m <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(m);
  const double p = static_cast<double>(k) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Guard the endpoints against rounding.
  w.lo = std::min(w.lo, p);
  w.hi = std::max(w.hi, p);
  return w;
}

MonteCarloSummary summarize(long runs, long converged, long diverged, long failed) {
  MonteCarloSummary s;
  s.runs = runs;
  s.converged = converged;
  s.diverged = diverged;
  s.failed = failed;
  s.estimate = runs > 0 ? static_cast<double>(converged) / static_cast<double>(runs) : 0.0;
  s.interval = wilson_interval(converged, runs);
  return s;
}

nlohmann::json to_json(const MonteCarloSummary& s) {
  return {{"runs", s.runs},
          {"converged", s.converged},
          {"diverged", s.diverged},
          {"failed", s.failed},
          {"estimate", s.estimate},
          {"wilson_lo", s.interval.lo},
          {"wilson_hi", s.interval.hi}};
}

std::string to_string(RateModel m) {
  return m == RateModel::GeometricLog ? "geometric_log" : "power_log";
}

RateModel rate_model_from_string(const std::string& s) {
  if (s == "geometric_log") return RateModel::GeometricLog;
  if (s == "power_log") return RateModel::PowerLog;
  throw std::invalid_argument("analysis.rate_model: expected geometric_log or power_log, got '" + s + "'");
}

RateFit fit_rate(const std::vector<long>& n, const std::vector<double>& dist, RateModel model,
                 long burn_in) {
  if (n.size() != dist.size()) throw std::invalid_argument("fit_rate: length mismatch");
  RateFit fit;
  fit.model = model;
  fit.burn_in = burn_in;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (dist[k] == 0.0) {
      fit.finite_hit_index = n[k];
      break;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  long m = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] <= burn_in || !(dist[k] > 0.0) || !std::isfinite(dist[k])) continue;
    const double x = model == RateModel::GeometricLog ? static_cast<double>(n[k])
                                                      : std::log(static_cast<double>(n[k]));
    const double y = std::log(dist[k]);
    sx += x;
    sy += y;
    ++m;
  }
  fit.points = m;
  if (m < kMinRatePoints) {
    if (fit.finite_hit_index) return fit;
    throw std::invalid_argument("fit_rate: fewer than " + std::to_string(kMinRatePoints) +
                                " positive distances after burn-in");
  }
  // Centered second pass for accuracy.
  const double mx = sx / m, my = sy / m;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] <= burn_in || !(dist[k] > 0.0) || !std::isfinite(dist[k])) continue;
    const double x = (model == RateModel::GeometricLog ? static_cast<double>(n[k])
                                                       : std::log(static_cast<double>(n[k]))) - mx;
    const double y = std::log(dist[k]) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

RateFit fit_rate(const Trajectory& traj, RateModel model, std::optional<long> burn_in) {
  if (!traj.config.reference) throw std::invalid_argument("fit_rate: trajectory has no reference");
  std::vector<long> n;
  std::vector<double> d;
  for (const auto& p : traj.points) {
    n.push_back(p.n);
    d.push_back(p.dist_ref);
  }
  const long b = burn_in ? *burn_in : traj.horizon() / 5;
  return fit_rate(n, d, model, b);
}

nlohmann::json to_json(const RateFit& fit) {
  nlohmann::json j{{"model", to_string(fit.model)}, {"burn_in", fit.burn_in}, {"points", fit.points}};
  if (fit.points >= kMinRatePoints) {
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["r_squared"] = nullptr;
  }
  if (fit.finite_hit_index) j["finite_hit_index"] = *fit.finite_hit_index;
  else j["finite_hit_index"] = nullptr;
  return j;
}

void RecurrenceTracker::observe(long n, double y) {
  const double z = -y;
  const bool above = z > level_;
  if (!above) {
    stats_.last_return_index = n;
    if (started_ && above_) ++stats_.returns;
  }
  above_ = above;
  started_ = true;
  max_z_ = std::max(max_z_, z);
  stats_.max_excursion = max_z_ - level_;
}

RecurrenceStats recurrence_stats(const Trajectory& traj, double level) {
  RecurrenceTracker t(level);
  for (const auto& p : traj.points) {
    if (p.y.size() != 1) {
      throw UnsupportedError("recurrence_stats: needs a scalar dual state, got dimension " +
                             std::to_string(p.y.size()));
    }
    t.observe(p.n, p.y[0]);
  }
  return t.stats();
}

}  // namespace robeq
