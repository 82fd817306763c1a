#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = ROBUST_EQ_BIN;
const std::string kConfigs = ROBEQ_CONFIG_DIR;

int run_cli(const std::string& args, const std::string& err_file = "/dev/null") {
  const std::string cmd = "'" + kBin + "' " + args + " > /dev/null 2> '" + err_file + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("robeq_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string cfg(const std::string& file) { return "--config '" + kConfigs + "/" + file + "'"; }

}  // namespace

TEST(Cli, CertifyExitCodes) {
  const fs::path out = scratch("certify");
  EXPECT_EQ(run_cli("certify " + cfg("linear_interval_entropic.json") + " --out '" + out.string() + "'"), 0);
  const json c = json::parse(slurp(out / "certificate.json"));
  EXPECT_EQ(c["verdict"], "Robust");
  EXPECT_EQ(run_cli("certify " + cfg("boundary_quartic.json")), 1);
  EXPECT_EQ(run_cli("certify " + cfg("linear_interval_entropic.json") + " --set reference=[0.5]"), 2);
}

TEST(Cli, UsageAndConfigErrors) {
  const fs::path out = scratch("errors");
  const std::string err = (out / "err.txt").string();
  EXPECT_EQ(run_cli("simulate " + cfg("linear_interval_entropic.json") + " --set run.horizon=0", err), 64);
  const json e = json::parse(slurp(err));
  EXPECT_EQ(e["error"], "config.value");
  EXPECT_EQ(e["key"], "run.horizon");
  EXPECT_EQ(run_cli("simulate --config /nonexistent.json"), 64);
  EXPECT_EQ(run_cli("frobnicate"), 64);
  EXPECT_EQ(run_cli(""), 64);
}

TEST(Cli, SimulateWritesTrajectory) {
  const fs::path out = scratch("simulate");
  ASSERT_EQ(run_cli("simulate " + cfg("linear_interval_entropic.json") + " --out '" + out.string() + "'"), 0);
  const std::string csv = slurp(out / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,x0,y0,dist_ref,delta_n,gamma_n");
  const json s = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(s["horizon"], 100);
  EXPECT_EQ(s["status"], "ok");
}

// Same config and seed: byte-identical trajectory CSV; another seed differs.
TEST(Cli, SimulateIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::string base = "simulate " + cfg("interior_quadratic.json") + " --set run.horizon=2000";
  ASSERT_EQ(run_cli(base + " --seed 9 --out '" + a.string() + "'"), 0);
  ASSERT_EQ(run_cli(base + " --seed 9 --out '" + b.string() + "'"), 0);
  ASSERT_EQ(run_cli(base + " --seed 10 --out '" + c.string() + "'"), 0);
  const std::string ta = slurp(a / "trajectory.csv");
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b / "trajectory.csv"));
  EXPECT_NE(ta, slurp(c / "trajectory.csv"));
}

TEST(Cli, SweepThresholdsAndJobs) {
  const fs::path one = scratch("sweep_1"), many = scratch("sweep_4");
  const std::string base = "sweep " + cfg("coordination_spsa.json") + " --set run.horizon=3000 --seeds 8";
  const int code1 = run_cli(base + " --jobs 1 --out '" + one.string() + "'");
  const int code4 = run_cli(base + " --jobs 4 --out '" + many.string() + "'");
  EXPECT_TRUE(code1 == 0 || code1 == 3);
  EXPECT_EQ(code1, code4);
  EXPECT_EQ(slurp(one / "runs.csv"), slurp(many / "runs.csv"));
  const json s = json::parse(slurp(one / "sweep_summary.json"));
  EXPECT_EQ(s["runs"], 8);
  EXPECT_EQ(s["thresholds_met"].get<bool>(), code1 == 0);
  EXPECT_TRUE(fs::exists(one / "sweep.csv"));

  // Out-of-range thresholds are config errors; a missed one gives exit code 3.
  EXPECT_EQ(run_cli(base + " --set analysis.min_fraction=1.01 --out '" + one.string() + "'"), 64);
  EXPECT_EQ(run_cli("sweep " + cfg("interior_quadratic.json") +
                    " --set run.horizon=2000 --set analysis.max_fraction=0 --set analysis.eps_conv=0.5 --seeds 4"
                    " --out '" + one.string() + "'"),
            3);
}

TEST(Cli, PerturbCollapse) {
  const fs::path out = scratch("perturb");
  EXPECT_EQ(run_cli("perturb " + cfg("linear_interval_entropic.json") + " --kind collapse1 --eps 0.1 --out '" +
                    out.string() + "'"),
            0);
  const json p = json::parse(slurp(out / "perturb.json"));
  EXPECT_NEAR(p["uniform_payoff_distance"].get<double>(), 0.1, 1e-12);
  EXPECT_EQ(p["after"]["verdict"], "NotStationary");
  EXPECT_EQ(p["before"]["verdict"], "Robust");
  EXPECT_EQ(run_cli("perturb " + cfg("linear_interval_entropic.json") + " --kind collapse7"), 64);
}

TEST(Cli, RateFit) {
  const fs::path out = scratch("rate");
  ASSERT_EQ(run_cli("rate " + cfg("linear_interval_entropic.json") +
                    " --set regularizer=quadratic_kernel --out '" + out.string() + "'"),
            0);
  const json r = json::parse(slurp(out / "rate.json"));
  EXPECT_EQ(r["finite_hit_index"], 11);
  EXPECT_TRUE(fs::exists(out / "distance.csv"));
}
