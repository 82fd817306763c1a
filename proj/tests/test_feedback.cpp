#include <gtest/gtest.h>

#include <cmath>

#include "robeq/feedback.hpp"
#include "test_util.hpp"

using namespace robeq;

namespace {

Game catalog(const std::string& id, std::map<std::string, double> params = {}) {
  return make_game(CatalogSpec{id, std::move(params)});
}

}  // namespace

TEST(Feedback, PerfectOracleReturnsField) {
  const Game g = catalog("interior_quadratic");
  FeedbackStreams s(1, 0, 1);
  const auto f = sample_feedback(PerfectOracle{}, g, vec({0.3}), 1, s);
  EXPECT_DOUBLE_EQ(f.signal[0], 0.4);
  EXPECT_TRUE(std::isnan(f.delta));
  EXPECT_THROW(sample_feedback(PerfectOracle{}, g, vec({0.3}), 0, s), std::invalid_argument);
}

// Property: SFO noise has zero mean and the configured second moment.
TEST(Feedback, SfoMoments) {
  const Game g = catalog("linear_interval");
  const long M = 200000;
  for (const SfoOracle& o : {SfoOracle::gaussian(2.0), SfoOracle::rademacher(2.0)}) {
    FeedbackStreams s(7, 0, 1);
    double sum = 0, sq = 0;
    for (long k = 0; k < M; ++k) {
      const double xi = sample_feedback(o, g, vec({0.5}), k + 1, s).signal[0] - 1.0;
      if (o.noise == SfoOracle::Noise::Rademacher) EXPECT_DOUBLE_EQ(std::abs(xi), 2.0);
      sum += xi;
      sq += xi * xi;
    }
    // Five standard errors.
    EXPECT_NEAR(sum / M, 0.0, 5 * 2.0 / std::sqrt(M));
    EXPECT_NEAR(sq / M, 4.0, 5 * 4.0 * std::sqrt(2.0 / M));
  }
}

TEST(Feedback, SfoCovariance) {
  const Game g = catalog("coordination");
  Eigen::MatrixXd C(4, 4);
  C << 2, 0.5, 0, 0, 0.5, 1, 0, 0, 0, 0, 1, -0.3, 0, 0, -0.3, 0.5;
  const SfoOracle o = SfoOracle::gaussian_covariance(C);
  FeedbackStreams s(3, 0, 2);
  const Eigen::VectorXd x = vec({0.5, 0.5, 0.5, 0.5});
  const Eigen::VectorXd v = g.field(x);
  const long M = 100000;
  Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(4, 4);
  for (long k = 0; k < M; ++k) {
    const Eigen::VectorXd xi = sample_feedback(o, g, x, k + 1, s).signal - v;
    emp += xi * xi.transpose();
  }
  emp /= static_cast<double>(M);
  EXPECT_LE((emp - C).lpNorm<Eigen::Infinity>(), 0.05);
  EXPECT_THROW(SfoOracle::gaussian_covariance(-C), std::invalid_argument);
  EXPECT_THROW(validate_oracle(SfoOracle::gaussian_covariance(Eigen::MatrixXd::Identity(2, 2)),
                               g.domain()),
               std::invalid_argument);
}

TEST(Feedback, StreamsAreReproducibleAndIndependent) {
  const Game g = catalog("linear_interval");
  const auto draw = [&](std::uint64_t seed, std::uint64_t run) {
    FeedbackStreams s(seed, run, 1);
    std::vector<double> out;
    for (long n = 1; n <= 50; ++n)
      out.push_back(sample_feedback(SfoOracle::gaussian(1), g, vec({0.5}), n, s).signal[0]);
    return out;
  };
  EXPECT_EQ(draw(5, 2), draw(5, 2));
  EXPECT_NE(draw(5, 2), draw(5, 3));
  EXPECT_NE(draw(5, 2), draw(6, 2));
}

TEST(Feedback, SpsaDefaultsAndNmin) {
  const ProductDomain d({PlayerDomain::interval(0, 1)});
  const SpsaOracle o = make_spsa(d, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(o.pivots[0][0], 0.5);
  EXPECT_DOUBLE_EQ(o.radii[0], 0.25);
  // Brute force: first n with 1 / n^(1/4) < 1/4 is n = 257.
  long first = 1;
  while (!(o.delta(first) < 0.25)) ++first;
  EXPECT_EQ(first, 257);
  EXPECT_EQ(o.n_min(), first);
  EXPECT_EQ(make_spsa(d, 0.1, 0.25).n_min(), 1);

  const Game g = catalog("linear_interval");
  FeedbackStreams s(1, 0, 1);
  EXPECT_THROW(sample_feedback(o, g, vec({0.5}), first - 1, s), ScheduleError);
  EXPECT_NO_THROW(sample_feedback(o, g, vec({0.5}), first, s));
}

TEST(Feedback, SpsaRejectsBadPivots) {
  const ProductDomain d({PlayerDomain::interval(0, 1)});
  EXPECT_THROW(make_spsa(d, 0.1, 0.25, std::vector<Eigen::VectorXd>{vec({0.0})}), std::invalid_argument);
  EXPECT_THROW(make_spsa(d, 0.1, 0.25, std::nullopt, std::vector<double>{0.6}), std::invalid_argument);
  EXPECT_THROW(make_spsa(d, 0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(make_spsa(d, -0.1, 0.25), std::invalid_argument);
}

// Property: SPSA query points stay feasible for every base point and delta < r.
TEST(Feedback, SpsaQueriesFeasible) {
  const Game g = catalog("coordination");
  const SpsaOracle o = make_spsa(g.domain(), 0.2, 0.25);
  FeedbackStreams s(11, 0, 2);
  const auto pts = sample_points(g.domain(), 300, 4);
  const double rmin = std::min(o.radii[0], o.radii[1]);
  for (const auto& x : pts) {
    for (double delta : {rmin * 0.999, rmin / 2, 1e-3}) {
      const auto f = spsa_sample(o, g, x, delta, s);
      EXPECT_TRUE(g.domain().contains(f.queried_point, 1e-12));
    }
  }
  for (const Eigen::VectorXd& vtx : {vec({1, 0, 1, 0}), vec({0, 1, 1, 0})}) {
    const auto f = spsa_sample(o, g, vtx, rmin * 0.999, s);
    EXPECT_TRUE(g.domain().contains(f.queried_point, 1e-12));
  }
}

// The estimator is a randomized central difference at the pivot-shifted
// point; for a quadratic payoff its mean is exactly V at that point.
TEST(Feedback, SpsaBiasOnQuadratic) {
  const Game g = catalog("interior_quadratic");
  const ProductDomain& d = g.domain();
  const SpsaOracle o = make_spsa(d, 0.1, 0.25);
  const double x = 0.3;
  for (double delta : {0.1, 0.05}) {
    const double shifted = x + delta / o.radii[0] * (o.pivots[0][0] - x);
    const double want = 2 * (0.5 - shifted) - g.field(vec({x}))[0];
    EXPECT_NEAR(want, -1.6 * delta, 1e-12);
    FeedbackStreams s(9, 0, 1);
    const long M = 400000;
    const auto st = spsa_statistics(o, g, vec({x}), delta, M, s);
    // |v_hat| <= max|u| / delta; CLT band of five standard errors.
    EXPECT_LE(st.max_norm, 0.25 / delta + 1e-12);
    EXPECT_NEAR(st.bias[0], want, 5 * st.max_norm / std::sqrt(M));
  }
}

// For a linear payoff on a simplex the mean is the tangent projection of the
// gradient, independent of delta.
TEST(Feedback, SpsaLinearPayoffOnSimplex) {
  const ProductDomain d({PlayerDomain::simplex(3)});
  const Eigen::VectorXd c = vec({1.0, -0.5, 0.25});
  const Game g(d, {[c](const Eigen::VectorXd& x) { return c.dot(x); }},
               {[c](const Eigen::VectorXd&) { return c; }}, "linear_simplex");
  const Eigen::MatrixXd B = d.player(0).affine_basis();
  ASSERT_NEAR((B.transpose() * B - Eigen::MatrixXd::Identity(2, 2)).norm(), 0.0, 1e-12);
  const Eigen::VectorXd proj = B * B.transpose() * c;
  const SpsaOracle o = make_spsa(d, 0.1, 0.25);
  // The pivot shift does not matter for a linear payoff: the mean is exact.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  FeedbackStreams s(2, 0, 1);
  const long M = 200000;
  double bound = 0;
  for (long k = 0; k < M; ++k) {
    const auto f = spsa_sample(o, g, vec({0.2, 0.3, 0.5}), 0.05, s);
    mean += f.signal;
    bound = std::max(bound, f.signal.cwiseAbs().maxCoeff());
  }
  mean /= static_cast<double>(M);
  EXPECT_LE((mean - proj).lpNorm<Eigen::Infinity>(), 5 * bound / std::sqrt(M));
}

TEST(Feedback, OracleNames) {
  EXPECT_EQ(oracle_name(PerfectOracle{}), "perfect");
  EXPECT_EQ(oracle_name(SfoOracle::gaussian(1)), "sfo_gaussian");
  EXPECT_EQ(oracle_name(SfoOracle::rademacher(1)), "sfo_rademacher");
  EXPECT_EQ(oracle_name(SpsaOracle{}), "spsa");
}
