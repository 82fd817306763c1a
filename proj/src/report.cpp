#include "robeq/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace robeq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index dx = traj.final_x.size();
  const Eigen::Index dy = traj.points.empty() ? dx : traj.points.front().y.size();
  out << "n";
  for (Eigen::Index j = 0; j < dx; ++j) out << ",x" << j;
  for (Eigen::Index j = 0; j < dy; ++j) out << ",y" << j;
  out << ",dist_ref,delta_n,gamma_n\n";
  for (const auto& p : traj.points) {
    out << p.n;
    for (Eigen::Index j = 0; j < p.x.size(); ++j) out << ',' << format_double(p.x[j]);
    for (Eigen::Index j = 0; j < p.y.size(); ++j) out << ',' << format_double(p.y[j]);
    out << ',' << format_double(p.dist_ref) << ',' << format_double(p.delta_n) << ','
        << format_double(p.gamma_n) << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream s;
  write_trajectory_csv(s, traj);
  return s.str();
}

nlohmann::json run_summary(const Trajectory& traj, const ConvergenceCriterion* crit) {
  nlohmann::json j;
  if (crit && traj.config.reference) j["converged"] = classify_convergence(traj, *crit);
  else j["converged"] = nullptr;
  if (traj.config.reference) {
    j["final_dist"] = distance(traj.final_x, *traj.config.reference, traj.config.norm);
  } else {
    j["final_dist"] = nullptr;
  }
  j["saturation"] = traj.saturated;
  j["seed"] = traj.seed;
  j["status"] = traj.status == RunStatus::Ok ? "ok" : "diverged";
  j["horizon"] = traj.horizon();
  return j;
}

void write_runs_csv(std::ostream& out, const SweepResult& result) {
  out << "run,converged,diverged,failed,saturated,final_dist,window_max_dist,returns,"
         "last_return_index,max_excursion\n";
  for (const auto& r : result.runs) {
    out << r.run_index << ',' << r.converged << ',' << r.diverged << ',' << r.failed << ','
        << r.saturated << ',' << format_double(r.final_dist) << ','
        << format_double(r.window_max_dist);
    if (r.recurrence) {
      out << ',' << r.recurrence->returns << ',' << r.recurrence->last_return_index << ','
          << format_double(r.recurrence->max_excursion);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_sweep_table(std::ostream& out, const SweepLabel& label, const SweepResult& result,
                       long block) {
  const long m = static_cast<long>(result.runs.size());
  if (block <= 0) block = std::max(m, 1L);
  out << "game,regularizer,oracle,gamma,seed,first_run,runs,converged,diverged,failed,estimate,"
         "wilson_lo,wilson_hi\n";
  for (long start = 0; start < m; start += block) {
    const long end = std::min(m, start + block);
    long conv = 0, div = 0, fail = 0;
    for (long i = start; i < end; ++i) {
      const auto& r = result.runs[static_cast<std::size_t>(i)];
      conv += r.converged;
      div += r.diverged;
      fail += r.failed;
    }
    const MonteCarloSummary s = summarize(end - start, conv, div, fail);
    out << label.game << ',' << label.regularizer << ',' << label.oracle << ','
        << format_double(label.gamma) << ',' << label.seed << ',' << start << ',' << s.runs << ','
        << s.converged << ',' << s.diverged << ',' << s.failed << ',' << format_double(s.estimate)
        << ',' << format_double(s.interval.lo) << ',' << format_double(s.interval.hi) << '\n';
  }
}

}  // namespace robeq
