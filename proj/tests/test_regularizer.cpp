#include <gtest/gtest.h>

#include <random>

#include "robeq/regularizer.hpp"
#include "test_util.hpp"

using namespace robeq;

namespace {

RegularizerSpec one(const std::string& name) { return RegularizerSpec::uniform(PlayerRegularizer::named(name), 1); }

ProductDomain unit() { return ProductDomain({PlayerDomain::interval(0, 1)}); }

}  // namespace

TEST(Regularizer, KernelInverseIdentity) {
  for (const Kernel& k : {Kernel::entropic(), Kernel::sqrt_kernel(), Kernel::quadratic()}) {
    for (double z : {0.01, 0.3, 1.0, 2.5}) {
      EXPECT_NEAR(k.theta_prime_inv(k.theta_prime(z)), z, 1e-12 * std::max(1.0, z)) << k.name;
    }
  }
  EXPECT_TRUE(Kernel::entropic().steep());
  EXPECT_TRUE(Kernel::sqrt_kernel().steep());
  EXPECT_FALSE(Kernel::quadratic().steep());
}

TEST(Regularizer, EntropicIntervalClosedForm) {
  // argmax y x - x log x on [0, 1]: x = exp(y - 1) capped at 1.
  for (double y : {-5.0, -1.0, 0.0, 0.5, 1.0, 3.0}) {
    EXPECT_NEAR(mirror(one("entropic"), unit(), vec({y}))[0], std::min(std::exp(y - 1), 1.0), 1e-15);
  }
}

TEST(Regularizer, SqrtIntervalClosedForm) {
  // argmax y x + 2 sqrt(x) on [0, 1]: x = y^-2 for y <= -1, else 1.
  for (double y : {-10.0, -3.0, -1.0, -0.5, 0.0, 2.0}) {
    const double want = y <= -1.0 ? 1.0 / (y * y) : 1.0;
    EXPECT_NEAR(mirror(one("sqrt"), unit(), vec({y}))[0], want, 1e-15);
  }
}

TEST(Regularizer, QuadraticKernelAndEuclideanClamp) {
  for (double y : {-0.5, 0.0, 0.25, 1.0, 7.0}) {
    const double want = std::clamp(y, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(mirror(one("quadratic_kernel"), unit(), vec({y}))[0], want);
    EXPECT_DOUBLE_EQ(mirror(one("euclidean"), unit(), vec({y}))[0], want);
  }
}

TEST(Regularizer, EntropicSimplexIsSoftmax) {
  const ProductDomain d({PlayerDomain::simplex(3)});
  const Eigen::VectorXd y = vec({1.0, -2.0, 0.5});
  const Eigen::VectorXd e = y.array().exp();
  EXPECT_NEAR((mirror(one("entropic"), d, y) - e / e.sum()).norm(), 0.0, 1e-15);
  // Shift invariance and no overflow at huge scores.
  const Eigen::VectorXd big = mirror(one("entropic"), d, vec({1000.0, 999.0, -1000.0}));
  EXPECT_TRUE(big.allFinite());
  EXPECT_NEAR(big[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(Regularizer, SimplexProjectionSatisfiesKkt) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> N(0, 2);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd v(5);
    for (int j = 0; j < 5; ++j) v[j] = N(gen);
    const Eigen::VectorXd x = project_simplex(v);
    EXPECT_NEAR(x.sum(), 1.0, 1e-12);
    EXPECT_GE(x.minCoeff(), 0.0);
    // KKT: v - x = tau on the support, <= tau off it.
    double tau = 0;
    for (int j = 0; j < 5; ++j)
      if (x[j] > 0) tau = v[j] - x[j];
    for (int j = 0; j < 5; ++j) {
      if (x[j] > 0) EXPECT_NEAR(v[j] - x[j], tau, 1e-12);
      else EXPECT_LE(v[j], tau + 1e-12);
    }
  }
}

// Property: closed-form mirror maps agree with lattice argmax on every
// registered pair.
TEST(Regularizer, MirrorMatchesBruteForce) {
  struct Pair {
    std::string reg;
    PlayerDomain dom;
    double step;
  };
  const std::vector<Pair> pairs = {
      {"euclidean", PlayerDomain::interval(0, 1), 1e-3},
      {"euclidean", PlayerDomain::box(vec({0, -1}), vec({1, 1})), 5e-3},
      {"euclidean", PlayerDomain::simplex(3), 1.0 / 200},
      {"entropic", PlayerDomain::interval(0, 1), 1e-3},
      {"entropic", PlayerDomain::box(vec({0, 0}), vec({1, 2})), 5e-3},
      {"entropic", PlayerDomain::simplex(3), 1.0 / 200},
      {"sqrt", PlayerDomain::interval(0, 1), 1e-3},
      {"sqrt", PlayerDomain::box(vec({0, 0}), vec({1, 1})), 5e-3},
      {"quadratic_kernel", PlayerDomain::interval(-1, 1), 1e-3},
  };
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> U(-3, 3);
  for (const auto& p : pairs) {
    const ProductDomain d({p.dom});
    const RegularizerSpec r = one(p.reg);
    for (int t = 0; t < 15; ++t) {
      Eigen::VectorXd y(p.dom.dim());
      for (int j = 0; j < y.size(); ++j) y[j] = U(gen);
      const Eigen::VectorXd closed = mirror(r, d, y);
      const Eigen::VectorXd brute = mirror_bruteforce(r, d, y, p.step);
      EXPECT_LE((closed - brute).lpNorm<Eigen::Infinity>(), 2 * p.step)
          << p.reg << " y=" << y.transpose();
      EXPECT_TRUE(d.contains(closed, 1e-12));
    }
  }
}

TEST(Regularizer, PolytopeHasNoMirror) {
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  const ProductDomain d({PlayerDomain::polytope(A, vec({1}), {true, true})});
  EXPECT_THROW(validate_pairs(one("entropic"), d), UnsupportedError);
  EXPECT_THROW(validate_pairs(one("euclidean"), d), UnsupportedError);
  EXPECT_THROW(validate_pairs(one("sqrt"), ProductDomain({PlayerDomain::simplex(2)})), UnsupportedError);
  EXPECT_THROW(PlayerRegularizer::named("tsallis"), std::invalid_argument);
}

// Property: mirror(grad_h(x)) == x at interior points.
TEST(Regularizer, MirrorInvertsGradH) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  const ProductDomain box({PlayerDomain::box(vec({0, 0}), vec({1, 1}))});
  for (const std::string name : {"euclidean", "entropic", "sqrt", "quadratic_kernel"}) {
    const RegularizerSpec r = one(name);
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd x = vec({U(gen), U(gen)});
      EXPECT_NEAR((mirror(r, box, grad_h(r, box, x)) - x).norm(), 0.0, 1e-12) << name;
    }
  }
  const ProductDomain tri({PlayerDomain::simplex(3)});
  const Eigen::VectorXd x = vec({0.2, 0.3, 0.5});
  EXPECT_NEAR((mirror(one("entropic"), tri, grad_h(one("entropic"), tri, x)) - x).norm(), 0.0, 1e-12);
}

TEST(Regularizer, GradHAtBoundary) {
  EXPECT_THROW(grad_h(one("entropic"), unit(), vec({0.0})), SteepnessError);
  EXPECT_THROW(grad_h(one("sqrt"), unit(), vec({0.0})), SteepnessError);
  EXPECT_DOUBLE_EQ(grad_h(one("quadratic_kernel"), unit(), vec({0.0}))[0], 0.0);
  EXPECT_DOUBLE_EQ(grad_h(one("euclidean"), unit(), vec({1.0}))[0], 1.0);
}

TEST(Regularizer, RateFunction) {
  EXPECT_NEAR(rate_function(Kernel::entropic(), -3.0), std::exp(-4.0), 1e-16);
  EXPECT_NEAR(rate_function(Kernel::sqrt_kernel(), -4.0), 1.0 / 16, 1e-16);
  EXPECT_DOUBLE_EQ(rate_function(Kernel::sqrt_kernel(), 0.5), INFINITY);
  EXPECT_DOUBLE_EQ(rate_function(Kernel::quadratic(), -2.0), 0.0);
  EXPECT_DOUBLE_EQ(rate_function(Kernel::quadratic(), 0.25), 0.25);
}
