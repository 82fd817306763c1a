#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "robeq/analysis.hpp"
#include "robeq/dynamics.hpp"
#include "robeq/sweep.hpp"

namespace robeq {

// Shortest decimal string that reads back to the same double. NaN and
// infinities print as nan, inf, -inf.
std::string format_double(double v);

// Columns n, x0.., y0.., dist_ref, delta_n, gamma_n.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

// {converged, final_dist, saturation, seed, status, horizon}; converged and
// final_dist are null without a criterion / reference.
nlohmann::json run_summary(const Trajectory& traj, const ConvergenceCriterion* crit);

// One row per run.
void write_runs_csv(std::ostream& out, const SweepResult& result);

struct SweepLabel {
  std::string game;
  std::string regularizer;
  std::string oracle;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

// One row per seed block of `block` consecutive runs (block <= 0: one block).
void write_sweep_table(std::ostream& out, const SweepLabel& label, const SweepResult& result,
                       long block = 0);

}  // namespace robeq
