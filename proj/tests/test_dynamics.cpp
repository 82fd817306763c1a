#include <gtest/gtest.h>

#include <cmath>

#include "robeq/dynamics.hpp"
#include "test_util.hpp"

using namespace robeq;

namespace {

Game catalog(const std::string& id, std::map<std::string, double> params = {}) {
  return make_game(CatalogSpec{id, std::move(params)});
}

RegularizerSpec reg(const std::string& name, int players = 1) {
  return RegularizerSpec::uniform(PlayerRegularizer::named(name), players);
}

RunConfig dual_run(Eigen::VectorXd y, double gamma, long horizon, std::uint64_t seed = 0) {
  RunConfig c;
  c.step = ConstantStep{gamma};
  c.horizon = horizon;
  c.init = DualInit{std::move(y)};
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Dynamics, StepValue) {
  EXPECT_DOUBLE_EQ(step_value(ConstantStep{0.3}, 17), 0.3);
  EXPECT_DOUBLE_EQ(step_value(PowerStep{2.0, 0.5}, 16), 0.5);
  EXPECT_DOUBLE_EQ(step_value(PowerStep{1.0, 1.0}, 4), 0.25);
}

TEST(Dynamics, Distance) {
  const Eigen::VectorXd a = vec({1, -2}), b = vec({0, 0});
  EXPECT_DOUBLE_EQ(distance(a, b, DistanceNorm::L1), 3.0);
  EXPECT_DOUBLE_EQ(distance(a, b, DistanceNorm::L2), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(distance(a, b, DistanceNorm::Linf), 2.0);
}

TEST(Dynamics, ValidateRunConfig) {
  const ProductDomain d({PlayerDomain::interval(0, 1)});
  RunConfig c = dual_run(vec({0}), 0.1, 10);
  EXPECT_NO_THROW(validate_run_config(c, d));
  c.horizon = 0;
  EXPECT_THROW(validate_run_config(c, d), std::invalid_argument);
  c = dual_run(vec({0, 0}), 0.1, 10);
  EXPECT_THROW(validate_run_config(c, d), std::invalid_argument);
  c = dual_run(vec({0}), -0.1, 10);
  EXPECT_THROW(validate_run_config(c, d), std::invalid_argument);
  c = dual_run(vec({0}), 0.1, 10);
  c.algorithm = Algorithm::MD;
  EXPECT_THROW(validate_run_config(c, d), std::invalid_argument);
  c.init = PrimalInit{vec({1.5})};
  EXPECT_THROW(validate_run_config(c, d), std::invalid_argument);
}

// Quadratic kernel on [0,1], u = x, y_1 = 0, gamma = 0.1: y_n = 0.1 (n - 1),
// so x_n = min(y_n, 1) first equals 1 at n = 11.
TEST(Dynamics, QuadraticKernelFiniteHit) {
  RunConfig c = dual_run(vec({0}), 0.1, 20);
  c.reference = vec({1});
  const Trajectory t = run_ftrl(catalog("linear_interval"), reg("quadratic_kernel"), PerfectOracle{}, c);
  ASSERT_EQ(t.points.size(), 20u);
  for (const auto& p : t.points) {
    const double want = std::min(0.1 * static_cast<double>(p.n - 1), 1.0);
    EXPECT_NEAR(p.x[0], want, 1e-15) << p.n;
    EXPECT_EQ(p.dist_ref == 0.0, p.n >= 11) << p.n;
  }
}

// Entropic on [0,1], u = x: x_n = min(exp(y_1 + gamma (n-1) - 1), 1).
TEST(Dynamics, EntropicClosedForm) {
  const Trajectory t = run_ftrl(catalog("linear_interval"), reg("entropic"), PerfectOracle{},
                                dual_run(vec({-3}), 0.05, 200));
  for (const auto& p : t.points) {
    const double y = -3 + 0.05 * static_cast<double>(p.n - 1);
    EXPECT_NEAR(p.y[0], y, 1e-12);
    EXPECT_NEAR(p.x[0], std::min(std::exp(y - 1), 1.0), 1e-12);
  }
}

// Property: y_{n+1} - y_n = gamma_n V(x_n) and x_n = Q(y_n) under perfect feedback.
TEST(Dynamics, FtrlStateIdentity) {
  const Game g = catalog("coordination");
  const RegularizerSpec r = reg("entropic", 2);
  RunConfig c = dual_run(vec({0.3, -0.2, 0.1, 0.0}), 0, 300);
  c.step = PowerStep{0.5, 0.6};
  const Trajectory t = run_ftrl(g, r, PerfectOracle{}, c);
  for (std::size_t k = 0; k + 1 < t.points.size(); ++k) {
    const auto& p = t.points[k];
    EXPECT_NEAR((mirror(r, g.domain(), p.y) - p.x).norm(), 0.0, 1e-14);
    const Eigen::VectorXd inc = t.points[k + 1].y - p.y;
    EXPECT_NEAR((inc - p.gamma_n * g.field(p.x)).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
  }
}

// Property: every iterate is feasible, for every oracle and regularizer pair.
TEST(Dynamics, IteratesFeasible) {
  const Game g = catalog("coordination");
  const std::vector<OracleSpec> oracles = {PerfectOracle{}, SfoOracle::gaussian(3.0),
                                           SfoOracle::rademacher(2.0),
                                           make_spsa(g.domain(), 0.3, 0.25)};
  for (const std::string name : {"entropic", "euclidean"}) {
    for (const auto& o : oracles) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Trajectory t = run_ftrl(g, reg(name, 2), o, dual_run(vec({0, 0, 0, 0}), 0.2, 500, seed));
        for (const auto& p : t.points) ASSERT_TRUE(g.domain().contains(p.x, 1e-12)) << name;
      }
    }
  }
}

TEST(Dynamics, DeterministicGivenSeedAndRun) {
  const Game g = catalog("linear_interval");
  RunConfig c = dual_run(vec({0}), 0.1, 400, 42);
  const auto a = run_ftrl(g, reg("entropic"), SfoOracle::gaussian(1), c);
  const auto b = run_ftrl(g, reg("entropic"), SfoOracle::gaussian(1), c);
  c.run_index = 1;
  const auto other = run_ftrl(g, reg("entropic"), SfoOracle::gaussian(1), c);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].y, b.points[k].y);
  EXPECT_NE(a.final_y, other.final_y);
}

TEST(Dynamics, ThinningKeepsLastIterate) {
  RunConfig c = dual_run(vec({0}), 0.1, 25);
  c.thinning = 10;
  std::vector<long> seen;
  long calls = 0;
  const auto t = run_ftrl(catalog("zero"), reg("entropic"), PerfectOracle{}, c,
                          [&](long n, const Eigen::VectorXd&, const Eigen::VectorXd&) {
                            ++calls;
                            EXPECT_EQ(n, calls);
                          });
  for (const auto& p : t.points) seen.push_back(p.n);
  EXPECT_EQ(seen, (std::vector<long>{1, 11, 21, 25}));
  EXPECT_EQ(calls, 25);
}

// With a steep regularizer MD coincides with FTRL.
TEST(Dynamics, MdDelegatesForSteepRegularizers) {
  const Game g = catalog("coordination");
  RunConfig c;
  c.algorithm = Algorithm::MD;
  c.step = ConstantStep{0.1};
  c.horizon = 200;
  c.init = PrimalInit{vec({0.6, 0.4, 0.3, 0.7})};
  c.seed = 3;
  const auto md = run_md(g, reg("entropic", 2), SfoOracle::gaussian(1), c);
  RunConfig f = c;
  f.algorithm = Algorithm::FTRL;
  const auto ftrl = run_ftrl(g, reg("entropic", 2), SfoOracle::gaussian(1), f);
  EXPECT_EQ(md.config.algorithm, Algorithm::MD);
  EXPECT_NEAR((md.final_x - ftrl.final_x).norm(), 0.0, 1e-12);
}

// Away from the boundary the Euclidean projection is inactive and both
// schemes reduce to plain gradient ascent.
TEST(Dynamics, MdMatchesFtrlInTheInterior) {
  const Game g = catalog("interior_quadratic");
  RunConfig c;
  c.step = ConstantStep{0.05};
  c.horizon = 300;
  c.init = PrimalInit{vec({0.4})};
  const auto ftrl = run_ftrl(g, reg("euclidean"), PerfectOracle{}, c);
  c.algorithm = Algorithm::MD;
  const auto md = run_md(g, reg("euclidean"), PerfectOracle{}, c);
  ASSERT_EQ(md.points.size(), ftrl.points.size());
  for (std::size_t k = 0; k < md.points.size(); ++k) {
    EXPECT_NEAR(md.points[k].x[0], ftrl.points[k].x[0], 1e-12);
  }
  EXPECT_NEAR(md.final_x[0], 0.5, 1e-6);
}

// Eager projected SGA at x* = 1 of u = x with signal 1 + U, U = +/-2:
// whenever x_n = 1, x_{n+1} = 1 - gamma with probability 1/2, so the iterate
// leaves x* infinitely often. The lazy FTRL variant accumulates the positive
// drift in the dual and stays at x* for good.
TEST(Dynamics, SgaEscapeVersusLazyFtrl) {
  const Game g = catalog("linear_interval");
  const double gamma = 0.1;
  RunConfig c;
  c.algorithm = Algorithm::MD;
  c.step = ConstantStep{gamma};
  c.horizon = 20000;
  c.init = PrimalInit{vec({1})};
  c.seed = 8;
  const auto md = run_md(g, reg("euclidean"), SfoOracle::rademacher(2.0), c);
  long at_one = 0, escapes = 0, late_escapes = 0;
  for (std::size_t k = 0; k + 1 < md.points.size(); ++k) {
    if (md.points[k].x[0] != 1.0) continue;
    ++at_one;
    const double next = md.points[k + 1].x[0];
    ASSERT_TRUE(next == 1.0 || std::abs(next - (1 - gamma)) < 1e-15);
    if (next != 1.0) {
      ++escapes;
      if (md.points[k].n > c.horizon / 2) ++late_escapes;
    }
  }
  const double frac = static_cast<double>(escapes) / static_cast<double>(at_one);
  EXPECT_NEAR(frac, 0.5, 5 * 0.5 / std::sqrt(static_cast<double>(at_one)));
  EXPECT_GT(late_escapes, 100);

  // signal in {0, 2}: the projection never lets the iterate leave.
  const auto calm = run_md(g, reg("euclidean"), SfoOracle::rademacher(1.0), c);
  for (const auto& p : calm.points) EXPECT_EQ(p.x[0], 1.0);

  RunConfig f = dual_run(vec({1}), gamma, c.horizon, c.seed);
  const auto lazy = run_ftrl(g, reg("euclidean"), SfoOracle::rademacher(2.0), f);
  long last_off = 0;
  for (const auto& p : lazy.points)
    if (p.x[0] != 1.0) last_off = p.n;
  EXPECT_LT(last_off, c.horizon / 10);
}

// A non-equilibrium is not a limit: from x = 0.5 of u = x the iterate
// leaves and ends at 1.
TEST(Dynamics, NonEquilibriumIsNotALimit) {
  RunConfig c;
  c.step = ConstantStep{0.1};
  c.horizon = 2000;
  c.init = PrimalInit{vec({0.5})};
  c.reference = vec({0.5});
  const auto t = run_ftrl(catalog("linear_interval"), reg("entropic"), SfoOracle::gaussian(1), c);
  EXPECT_GT(t.points.back().dist_ref, 0.4);
}

// Under perfect feedback the dual drifts linearly into the normal cone at a
// robust vertex: y_n / n -> gamma V(x*).
TEST(Dynamics, DualDriftAtStrictEquilibrium) {
  const Game g = catalog("coordination");
  const auto t = run_ftrl(g, reg("entropic", 2), PerfectOracle{}, dual_run(vec({1, 0, 1, 0}), 0.1, 5000));
  const Eigen::VectorXd drift = t.final_y / static_cast<double>(t.horizon() - 1);
  const Eigen::VectorXd want = 0.1 * g.field(vec({1, 0, 1, 0}));
  EXPECT_NEAR((drift - want).lpNorm<Eigen::Infinity>(), 0.0, 1e-3);
}

TEST(Dynamics, NanFeedbackDiverges) {
  const ProductDomain d({PlayerDomain::interval(0, 1)});
  const Game bad(d, {[](const Eigen::VectorXd& x) { return x[0]; }},
                 {[](const Eigen::VectorXd& x) { return vec({x[0] > 0.6 ? NAN : 1.0}); }}, "bad");
  const auto t = run_ftrl(bad, reg("euclidean"), PerfectOracle{}, dual_run(vec({0.5}), 0.1, 50));
  EXPECT_EQ(t.status, RunStatus::Diverged);
  EXPECT_LT(t.points.back().n, 50);
}

TEST(Dynamics, DualClampSetsSaturation) {
  const ProductDomain d({PlayerDomain::interval(0, 1)});
  const Game huge(d, {[](const Eigen::VectorXd& x) { return 1e299 * x[0]; }},
                  {[](const Eigen::VectorXd&) { return vec({1e299}); }}, "huge");
  const auto t = run_ftrl(huge, reg("entropic"), PerfectOracle{}, dual_run(vec({0}), 100.0, 5));
  EXPECT_TRUE(t.saturated);
  EXPECT_EQ(t.status, RunStatus::Ok);
  EXPECT_DOUBLE_EQ(t.final_y[0], kDualClamp);
  EXPECT_DOUBLE_EQ(t.final_x[0], 1.0);
}

TEST(Dynamics, SpsaRecordsDelta) {
  const Game g = catalog("linear_interval");
  const SpsaOracle o = make_spsa(g.domain(), 0.5, 0.25);
  RunConfig c = dual_run(vec({0}), 0.05, 50);
  const auto t = run_ftrl(g, reg("entropic"), o, c);
  const long n0 = o.n_min();
  for (const auto& p : t.points) EXPECT_DOUBLE_EQ(p.delta_n, o.delta(std::max(p.n, n0)));
}
