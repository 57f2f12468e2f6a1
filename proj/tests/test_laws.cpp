#include "dfn/laws.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dfn;

namespace {

// Composite Simpson rule, independent of the closed-form primitives.
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

AdaptiveLaw forchheimer(double threshold) {
  return {LawBranch::constant(1.0), LawBranch::affine(0.01, 3.0), threshold, 0.0};
}

}  // namespace

TEST(Coefficient, LinearPair) {
  const auto law = test::linear_law(1.0, 0.1, 0.15);
  EXPECT_DOUBLE_EQ(eval_lambda_coefficient(law, 0.05, Regime::Low), 1.0);
  EXPECT_DOUBLE_EQ(eval_lambda_coefficient(law, 0.5, Regime::High), 0.1);
}

TEST(Coefficient, ForchheimerHighBranch) {
  EXPECT_NEAR(eval_lambda_coefficient(forchheimer(0.15), 0.2, Regime::High), 0.61, 1e-15);
  EXPECT_THROW(eval_lambda_coefficient(forchheimer(0.15), -0.1, Regime::High), std::invalid_argument);
}

TEST(Coefficient, LambdasAtThreshold) {
  const auto law = forchheimer(0.15);
  EXPECT_DOUBLE_EQ(law.lambda1(), 1.0);
  EXPECT_NEAR(law.lambda2(), 0.01 + 3.0 * 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(law.growth_exponent(), 3.0);
  EXPECT_DOUBLE_EQ(law.conjugate_exponent(), 1.5);
  EXPECT_DOUBLE_EQ(test::linear_law(1, 2, 1).growth_exponent(), 2.0);
}

TEST(Validation, RejectsBadLaws) {
  EXPECT_THROW(validate_law(test::linear_law(1.0, 0.1, 0.0)), std::invalid_argument);
  EXPECT_THROW(validate_law(test::linear_law(-1.0, 0.1, 1.0)), std::invalid_argument);
  EXPECT_NO_THROW(validate_law(forchheimer(0.15)));
}

TEST(Psi, ConstantPrimitiveVanishesAtOne) {
  const auto psi = build_psi(test::linear_law(1.0, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(psi.Phi1(1.0), 0.0);
  EXPECT_DOUBLE_EQ(psi.Phi1(3.0), 1.0);
  EXPECT_DOUBLE_EQ(psi.Phi1(0.0), -0.5);
}

TEST(Psi, LinearPairClosedForm) {
  EXPECT_NEAR(build_psi(test::linear_law(1.0, 0.1, 1.0))(4.0), 0.15, 1e-15);
}

TEST(Psi, AffinePrimitiveMatchesQuadrature) {
  const auto law = forchheimer(1.0);
  const auto psi = build_psi(law);
  EXPECT_NEAR(psi.Phi2(4.0), 7.015, 1e-12);
  const double oracle =
      simpson([&](double a) { return 0.5 * law.high.coefficient(law.threshold * std::sqrt(a)); }, 1.0, 4.0);
  EXPECT_NEAR(psi.Phi2(4.0), oracle, 1e-9);
}

TEST(Psi, AffinePrimitiveMatchesQuadratureAtCaseThreshold) {
  const auto law = forchheimer(0.15);
  const auto psi = build_psi(law);
  for (double a : {0.3, 2.0, 9.0}) {
    const double oracle =
        simpson([&](double x) { return 0.5 * law.high.coefficient(law.threshold * std::sqrt(x)); }, 1.0, a);
    EXPECT_NEAR(psi.Phi2(a), oracle, 1e-9) << "a = " << a;
  }
}

TEST(Psi, DensityDerivativeIsTheLaw) {
  const auto law = forchheimer(0.15);
  const auto psi = build_psi(law);
  const double step = 1e-6;
  for (double u : {0.05, -0.1, 0.2, -0.7}) {
    const double numeric = (psi.density(u + step) - psi.density(u - step)) / (2 * step);
    const auto regime = std::abs(u) < law.threshold ? Regime::Low : Regime::High;
    EXPECT_NEAR(numeric, eval_lambda_coefficient(law, std::abs(u), regime) * u, 1e-8) << "u = " << u;
  }
}

TEST(Psi, CustomNeedsPrimitive) {
  AdaptiveLaw law{LawBranch::constant(1.0), LawBranch::custom([](double) { return 1.0; }), 1.0, 2.0};
  EXPECT_THROW(build_psi(law), std::invalid_argument);
}

TEST(JumpSign, Classification) {
  EXPECT_EQ(jump_sign(test::linear_law(1.0, 0.1, 0.15)), JumpSign::Negative);
  EXPECT_EQ(jump_sign(test::linear_law(1.0, 1.0, 0.15)), JumpSign::Zero);
  EXPECT_EQ(jump_sign(test::linear_law(1.0, 1.0 / 0.5625, 0.15)), JumpSign::Positive);
}

TEST(Growth, ConstantHighBranch) {
  const auto rep = check_growth_bound(test::linear_law(1.0, 0.1, 0.15), 64);
  EXPECT_TRUE(rep.satisfied);
  EXPECT_NEAR(rep.c, 0.1, 1e-15);
  EXPECT_NEAR(rep.tail_slope, 0.0, 1e-12);
}

TEST(Growth, AffineHighBranch) {
  const auto rep = check_growth_bound(forchheimer(1.0), 64);
  EXPECT_TRUE(rep.satisfied);
  EXPECT_GE(rep.c, 3.0);
}

TEST(Growth, BoundedBranchFailsCubicGrowth) {
  AdaptiveLaw law{LawBranch::constant(1.0), LawBranch::affine(0.01, 0.0), 1.0, 3.0};
  const auto rep = check_growth_bound(law, 64);
  EXPECT_FALSE(rep.satisfied);
  EXPECT_LT(rep.c, 1e-4);
}

TEST(Convexity, IncreasingJumpIsConvex) {
  EXPECT_EQ(convexity_probe(build_psi(test::linear_law(1.0, 1.5, 0.15)), 10000, 1).violations, 0);
  EXPECT_EQ(convexity_probe(build_psi(test::linear_law(1.0, 1.0, 0.15)), 10000, 2).violations, 0);
}

TEST(Convexity, DecreasingJumpIsDetected) {
  const auto rep = convexity_probe(build_psi(test::linear_law(1.0, 0.1, 0.15)), 10000, 4);
  EXPECT_GE(rep.violations, 1);
  EXPECT_GT(rep.worst_gap, 0.0);
}

TEST(Convexity, SeedIsReproducible) {
  const auto psi = build_psi(test::linear_law(1.0, 0.1, 0.15));
  const auto a = convexity_probe(psi, 1000, 42);
  const auto b = convexity_probe(psi, 1000, 42);
  EXPECT_EQ(a.violations, b.violations);
  EXPECT_EQ(a.worst_gap, b.worst_gap);
}
