#pragma once

#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "robeq/dynamics.hpp"

namespace robeq {

// A run counts as converged when every recorded distance to the reference in
// the last window_frac of the horizon is at most eps_conv.
struct ConvergenceCriterion {
  Eigen::VectorXd reference;
  double eps_conv = 1e-3;
  double window_frac = 0.5;

  // Steps n > window_start() belong to the window.
  long window_start(long horizon) const;
};

void validate_criterion(const ConvergenceCriterion& crit, const ProductDomain& domain);

// Throws std::invalid_argument when the trajectory has no reference stream.
bool classify_convergence(const Trajectory& traj, const ConvergenceCriterion& crit);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// 95% score interval for k successes out of m trials.
WilsonInterval wilson_interval(long k, long m);

struct MonteCarloSummary {
  long runs = 0;
  long converged = 0;
  long diverged = 0;  // numeric divergence, counted as not converged
  long failed = 0;    // engine exceptions, counted as not converged
  double estimate = 0.0;
  WilsonInterval interval;
};

MonteCarloSummary summarize(long runs, long converged, long diverged, long failed);
nlohmann::json to_json(const MonteCarloSummary& s);

enum class RateModel { GeometricLog, PowerLog };
std::string to_string(RateModel m);
RateModel rate_model_from_string(const std::string& s);

struct RateFit {
  RateModel model = RateModel::GeometricLog;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  long burn_in = 0;
  long points = 0;
  // Set when the distance reaches exactly zero; the regression is then
  // skipped if fewer than kMinRatePoints positive distances remain.
  std::optional<long> finite_hit_index;
};

inline constexpr long kMinRatePoints = 20;

// Least squares of log dist against n (GeometricLog) or log n (PowerLog) on
// recorded points with n > burn_in and dist > 0. burn_in defaults to 20% of
// the horizon.
RateFit fit_rate(const Trajectory& traj, RateModel model, std::optional<long> burn_in = std::nullopt);

// Same fit on raw (n, dist) pairs.
RateFit fit_rate(const std::vector<long>& n, const std::vector<double>& dist, RateModel model,
                 long burn_in);

nlohmann::json to_json(const RateFit& fit);

struct RecurrenceStats {
  long returns = 0;            // down-crossings of z_n = -y_n below the level
  long last_return_index = 0;  // last n with z_n <= level (0 if none)
  double max_excursion = 0.0;  // max_n z_n - level
};

// Streaming form, fed one scalar dual state per step.
class RecurrenceTracker {
 public:
  explicit RecurrenceTracker(double level) : level_(level) {}
  void observe(long n, double y);
  RecurrenceStats stats() const { return stats_; }

 private:
  double level_;
  bool started_ = false;
  bool above_ = false;
  double max_z_ = -std::numeric_limits<double>::infinity();
  RecurrenceStats stats_;
};

// Over the recorded points. Throws UnsupportedError for duals of dimension
// other than one.
RecurrenceStats recurrence_stats(const Trajectory& traj, double level);

}  // namespace robeq
