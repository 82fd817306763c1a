#include "robeq/sweep.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace robeq {
namespace {

SweepResult aggregate(std::vector<RunResult> runs) {
  long conv = 0, div = 0, fail = 0;
  for (const auto& r : runs) {
    conv += r.converged;
    div += r.diverged;
    fail += r.failed;
  }
  SweepResult out;
  out.summary = summarize(static_cast<long>(runs.size()), conv, div, fail);
  out.runs = std::move(runs);
  return out;
}

}  // namespace

RunResult evaluate_run(const Experiment& exp, long run_index) {
  RunResult r;
  r.run_index = run_index;
  RunConfig cfg = exp.run;
  cfg.run_index = static_cast<std::uint64_t>(run_index);
  cfg.reference = exp.criterion.reference;
  // Only the endpoints are stored; the observer sees every step.
  cfg.thinning = cfg.horizon;

  const long start = exp.criterion.window_start(cfg.horizon);
  const bool track_rec = exp.recurrence_level.has_value();
  RecurrenceTracker rec(track_rec ? *exp.recurrence_level : 0.0);
  bool in_window_ok = true;
  double window_max = 0.0;
  const StepObserver observer = [&](long n, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (n > start) {
      const double d = distance(x, exp.criterion.reference, cfg.norm);
      window_max = std::max(window_max, d);
      if (!(d == 0.0 || d <= exp.criterion.eps_conv)) in_window_ok = false;
    }
    if (track_rec) rec.observe(n, y[0]);
  };
  try {
    if (track_rec && exp.game.domain().total_dim() != 1) {
      throw UnsupportedError("recurrence statistics need a scalar dual state");
    }
    const Trajectory t = run(exp.game, exp.reg, exp.oracle, cfg, observer);
    r.diverged = t.status == RunStatus::Diverged;
    r.saturated = t.saturated;
    r.final_x = t.final_x;
    r.final_dist = distance(t.final_x, exp.criterion.reference, cfg.norm);
    r.window_max_dist = window_max;
    r.converged = !r.diverged && in_window_ok;
    if (track_rec) r.recurrence = rec.stats();
  } catch (const std::exception& e) {
    r.failed = true;
    r.converged = false;
    r.error = e.what();
  }
  return r;
}

SweepResult sweep_serial(const Experiment& exp, long runs) {
  std::vector<RunResult> out;
  out.reserve(static_cast<std::size_t>(std::max(runs, 0L)));
  for (long i = 0; i < runs; ++i) out.push_back(evaluate_run(exp, i));
  return aggregate(std::move(out));
}

SweepResult sweep(const Experiment& exp, long runs, int jobs) {
  std::vector<RunResult> out(static_cast<std::size_t>(std::max(runs, 0L)));
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < runs; ++i) out[static_cast<std::size_t>(i)] = evaluate_run(exp, i);
  return aggregate(std::move(out));
}

MonteCarloSummary convergence_probability(const Experiment& exp, long runs, int jobs) {
  return sweep(exp, runs, jobs).summary;
}

double median_last_return(const SweepResult& result) {
  std::vector<double> v;
  for (const auto& r : result.runs) {
    if (r.recurrence) v.push_back(static_cast<double>(r.recurrence->last_return_index));
  }
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace robeq
