// robust_eq: certify equilibria and run learning-dynamics experiments from a
// JSON config. Exit codes: 0 robust / thresholds met / success, 1 stationary
// but not robust or runtime failure, 2 not stationary, 3 sweep thresholds
// missed, 64 usage or config error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robeq/config.hpp"
#include "robeq/report.hpp"

namespace fs = std::filesystem;
using namespace robeq;
using nlohmann::json;

namespace {

constexpr int kExitRobust = 0;
constexpr int kExitNonRobust = 1;
constexpr int kExitNotStationary = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitUsage = 64;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> seeds;
  int jobs = 0;
  std::string out;
  double eps = 0.1;
  std::string kind = "collapse1";
  int player = 0;
  std::vector<double> direction;
  std::vector<std::string> sets;
};

void report_error(const std::string& code, const std::string& key, const std::string& message) {
  json e{{"error", code}, {"message", message}};
  if (!key.empty()) e["key"] = key;
  std::cerr << e.dump() << '\n';
}

ExperimentConfig load(const Options& o) {
  std::vector<std::string> sets = o.sets;
  if (o.seed) sets.push_back("run.seed=" + std::to_string(*o.seed));
  if (o.seeds) sets.push_back("analysis.runs=" + std::to_string(*o.seeds));
  return load_config(o.config, sets);
}

fs::path out_dir(const Options& o, const ExperimentConfig& cfg) {
  fs::path d = o.out.empty() ? fs::path(cfg.output.dir) : fs::path(o.out);
  fs::create_directories(d);
  return d;
}

bool wants(const ExperimentConfig& cfg, const std::string& fmt) {
  return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), fmt) != cfg.output.formats.end();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << content;
}

Eigen::VectorXd require_reference(const ExperimentConfig& cfg) {
  if (!cfg.reference) throw ConfigError("config.missing", "reference", "a reference point x* is required");
  return *cfg.reference;
}

int cmd_certify(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const Game g = build_game(cfg);
  const Eigen::VectorXd x = require_reference(cfg);
  const RobustnessCertificate cert = classify_equilibrium(g, x, cfg.tolerances);
  const std::string text = to_json(cert).dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) write_file(out_dir(o, cfg) / "certificate.json", text);
  if (cert.verdict == Verdict::Robust) return kExitRobust;
  if (cert.verdict == Verdict::NotStationary) return kExitNotStationary;
  return kExitNonRobust;
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const Game g = build_game(cfg);
  RunConfig rc = cfg.run;
  rc.reference = cfg.reference;
  const Trajectory t = run(g, build_regularizer(cfg, g.domain()), build_oracle(cfg, g.domain()), rc);
  std::optional<ConvergenceCriterion> crit;
  if (cfg.reference) crit = ConvergenceCriterion{*cfg.reference, cfg.analysis.eps_conv, cfg.analysis.window_frac};
  const json summary = run_summary(t, crit ? &*crit : nullptr);
  const fs::path dir = out_dir(o, cfg);
  if (wants(cfg, "csv")) write_file(dir / "trajectory.csv", trajectory_csv(t));
  if (wants(cfg, "json")) write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const Experiment exp = build_experiment(cfg);
  const SweepResult res = sweep(exp, cfg.analysis.runs, o.jobs);
  json summary = to_json(res.summary);
  summary["config"] = to_json(cfg);
  if (exp.recurrence_level) summary["median_last_return_index"] = median_last_return(res);
  bool pass = true;
  if (cfg.analysis.min_fraction) pass = pass && res.summary.estimate >= *cfg.analysis.min_fraction;
  if (cfg.analysis.max_fraction) pass = pass && res.summary.estimate <= *cfg.analysis.max_fraction;
  const bool thresholds = cfg.analysis.min_fraction || cfg.analysis.max_fraction;
  summary["thresholds_met"] = thresholds ? json(pass) : json(nullptr);

  const fs::path dir = out_dir(o, cfg);
  if (wants(cfg, "csv")) {
    std::ostringstream runs, table;
    write_runs_csv(runs, res);
    const auto* c = std::get_if<CatalogSpec>(&cfg.game);
    const double gamma = std::holds_alternative<ConstantStep>(cfg.run.step)
                             ? std::get<ConstantStep>(cfg.run.step).gamma
                             : std::get<PowerStep>(cfg.run.step).gamma0;
    std::string reg;
    for (const auto& r : cfg.regularizer) reg += (reg.empty() ? "" : "+") + r;
    write_sweep_table(table, {c ? c->id : "bimatrix", reg, oracle_name(exp.oracle), gamma, cfg.run.seed}, res);
    write_file(dir / "runs.csv", runs.str());
    write_file(dir / "sweep.csv", table.str());
  }
  if (wants(cfg, "json")) write_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
  std::cout << to_json(res.summary).dump(2) << '\n';
  return thresholds && !pass ? kExitThreshold : 0;
}

int cmd_perturb(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const Game g = build_game(cfg);
  const Eigen::VectorXd x = require_reference(cfg);
  const auto& dom = g.domain();
  if (o.player < 0 || o.player >= dom.num_players()) {
    throw ConfigError("usage", "--player", "player index out of range");
  }
  Game h = g;
  if (o.kind == "collapse1") {
    h = perturb_collapse1(g, o.player, x, o.eps);
  } else if (o.kind == "collapse2") {
    Eigen::VectorXd y;
    if (!o.direction.empty()) {
      y = Eigen::Map<const Eigen::VectorXd>(o.direction.data(), static_cast<Eigen::Index>(o.direction.size()));
    } else {
      // Toward the player's center by default.
      y = dom.player(o.player).center() - dom.block(x, o.player);
    }
    h = perturb_collapse2(g, o.player, x, o.eps, y);
  } else {
    throw ConfigError("usage", "--kind", "expected collapse1 or collapse2, got '" + o.kind + "'");
  }
  const std::vector<Eigen::VectorXd> anchors{x};
  json report;
  report["kind"] = o.kind;
  report["eps"] = o.eps;
  report["player"] = o.player;
  report["uniform_payoff_distance"] = uniform_payoff_distance(g, h, 4096, cfg.run.seed, anchors);
  report["gradient_distance"] = game_distance(g, h, 4096, cfg.run.seed, anchors);
  report["before"] = to_json(classify_equilibrium(g, x, cfg.tolerances));
  report["after"] = to_json(classify_equilibrium(h, x, cfg.tolerances));
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) write_file(out_dir(o, cfg) / "perturb.json", text);
  return 0;
}

int cmd_rate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const Game g = build_game(cfg);
  RunConfig rc = cfg.run;
  rc.reference = require_reference(cfg);
  const Trajectory t = run(g, build_regularizer(cfg, g.domain()), build_oracle(cfg, g.domain()), rc);
  const RateFit fit = fit_rate(t, cfg.analysis.rate_model, cfg.analysis.burn_in);
  const json j = to_json(fit);
  const fs::path dir = out_dir(o, cfg);
  if (wants(cfg, "csv")) {
    std::ostringstream s;
    s << "n,dist_ref\n";
    for (const auto& p : t.points) s << p.n << ',' << format_double(p.dist_ref) << '\n';
    write_file(dir / "distance.csv", s.str());
  }
  if (wants(cfg, "json")) write_file(dir / "rate.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return 0;
}

int default_jobs() {
  if (const char* env = std::getenv("ROBUST_EQ_THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed ROBUST_EQ_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic robustness certificates and learning-dynamics experiments"};
  app.require_subcommand(1);
  Options o;
  o.jobs = default_jobs();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "Override a config field, e.g. run.horizon=500");
    sub->add_option("--out", o.out, "Output directory (defaults to output.dir)");
    sub->add_option("--seed", o.seed, "Base seed (overrides run.seed)");
  };
  auto* certify = app.add_subcommand("certify", "Classify the reference point of the config");
  auto* simulate = app.add_subcommand("simulate", "One seeded run; writes trajectory.csv and summary.json");
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo convergence probability");
  auto* perturb = app.add_subcommand("perturb", "Uniform-metric collapse constructions at the reference");
  auto* rate = app.add_subcommand("rate", "Fit the convergence rate of one run");
  for (auto* s : {certify, simulate, sweep_cmd, perturb, rate}) add_common(s);
  sweep_cmd->add_option("--seeds", o.seeds, "Number of runs (overrides analysis.runs)");
  sweep_cmd->add_option("--jobs", o.jobs, "Concurrent runs (default ROBUST_EQ_THREADS or all cores)");
  perturb->add_option("--kind", o.kind, "collapse1 | collapse2");
  perturb->add_option("--eps", o.eps, "Perturbation size");
  perturb->add_option("--player", o.player, "Perturbed player");
  perturb->add_option("--direction", o.direction, "collapse2 dual direction y for the player");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*certify) return cmd_certify(o);
    if (*simulate) return cmd_simulate(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*perturb) return cmd_perturb(o);
    return cmd_rate(o);
  } catch (const ConfigError& e) {
    report_error(e.code(), e.key(), e.what());
    return kExitUsage;
  } catch (const ConstructionError& e) {
    report_error("construction", "", e.what());
    return kExitNonRobust;
  } catch (const std::exception& e) {
    report_error("runtime", "", e.what());
    return kExitNonRobust;
  }
}
