#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robeq/analysis.hpp"
#include "robeq/dynamics.hpp"

namespace robeq {

// Everything one Monte Carlo cell needs. Runs differ only in run_index,
// which selects their random streams under the shared base seed run.seed.
struct Experiment {
  Game game;
  RegularizerSpec reg;
  OracleSpec oracle;
  RunConfig run;
  ConvergenceCriterion criterion;
  std::optional<double> recurrence_level;  // scalar duals only
};

struct RunResult {
  long run_index = 0;
  bool converged = false;
  bool diverged = false;
  bool failed = false;
  bool saturated = false;
  double final_dist = 0.0;
  double window_max_dist = 0.0;
  Eigen::VectorXd final_x;
  std::optional<RecurrenceStats> recurrence;
  std::string error;
};

struct SweepResult {
  MonteCarloSummary summary;
  std::vector<RunResult> runs;  // ordered by run_index
};

// One run evaluated against the criterion at every step (not only at
// recorded points). Engine exceptions are caught and reported as failed.
RunResult evaluate_run(const Experiment& exp, long run_index);

// Reference implementation: runs 0..M-1 one after another.
SweepResult sweep_serial(const Experiment& exp, long runs);

// OpenMP over runs; jobs <= 0 uses the OpenMP default. Results are identical
// to sweep_serial for any job count.
SweepResult sweep(const Experiment& exp, long runs, int jobs);

MonteCarloSummary convergence_probability(const Experiment& exp, long runs, int jobs);

// Median of last_return_index over runs that recorded recurrence statistics.
double median_last_return(const SweepResult& result);

}  // namespace robeq
