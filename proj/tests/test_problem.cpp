#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "bif/problem.hpp"

using namespace bif;

namespace {

ProblemSpec logistic(double L = 5) { return ProblemSpec(std::make_shared<GeneralizedLogistic>(1, 1, 1), L); }

}  // namespace

TEST(ProblemSpec, CachedConstants) {
  const auto s = logistic();
  EXPECT_NEAR(s.u0(), 0.5, 1e-12);
  EXPECT_NEAR(s.c_star(), 0.75, 1e-12);
  EXPECT_NEAR(s.g_c_star(), 0.1875, 1e-12);
  EXPECT_FALSE(s.infinite_slope());
  EXPECT_THROW(logistic(-1), Error);
}

TEST(Thresholds, Values) {
  const auto s = logistic();
  EXPECT_NEAR(lambda_min(s, 0.1), 0.4, 1e-12);
  EXPECT_NEAR(lambda_mu(s, 0.1), 8.0 / 15.0, 1e-12);
  EXPECT_NEAR(mu_lambda(s, 1), 0.1875, 1e-12);
  for (double mu : {1e-3, 0.1, 0.2}) EXPECT_LT(lambda_min(s, mu), lambda_mu(s, mu));
}

TEST(Omega, Membership) {
  const auto s = logistic();
  EXPECT_TRUE(in_omega(s, {0.1, 1}));
  EXPECT_FALSE(in_omega(s, {0.1, 0.5}));
  EXPECT_FALSE(in_omega(s, {0, 1}));
}

TEST(Evaluators, Formulas) {
  const auto s = logistic();
  const ParamPoint pt{0.1, 1};
  EXPECT_EQ(F_eval(s, pt, 0), 0.0);
  EXPECT_EQ(B_eval(s, pt, 0.4, 0.4), 0.0);
  EXPECT_NEAR(f_eval(s, pt, 0.5), 0.15, 1e-15);
}

TEST(Roots, ReferenceInstance) {
  const auto r = roots(logistic(), {0.1, 1});
  EXPECT_NEAR(r.varsigma, 0.112701665379258311, 1e-13);
  EXPECT_NEAR(r.beta, 0.887298334620741689, 1e-13);
  EXPECT_NEAR(r.theta, 0.237652461702020081, 1e-13);
  EXPECT_NEAR(r.varsigma, (1 - std::sqrt(0.6)) / 2, 1e-13);
  // u/2 - u^2/3 = 0.1
  EXPECT_NEAR(r.theta, (0.5 - std::sqrt(0.25 - 4.0 / 30.0)) * 1.5, 1e-13);
}

TEST(Roots, CoalesceAtLambdaMu) {
  const auto s = logistic();
  const auto r = roots(s, {0.1, lambda_mu(s, 0.1) * (1 + 1e-12)});
  EXPECT_NEAR(r.theta, 0.75, 1e-4);
  EXPECT_NEAR(r.beta, 0.75, 1e-4);
}

TEST(Roots, Ordering) {
  const auto s = logistic();
  for (double mu : {0.01, 0.1, 0.15})
    for (double f : {1.01, 2.0, 10.0}) {
      const auto r = roots(s, {mu, f * lambda_mu(s, mu)});
      EXPECT_LT(0, r.varsigma);
      EXPECT_LT(r.varsigma, r.theta);
      EXPECT_LT(r.theta, r.beta);
      EXPECT_LT(r.beta, 1);
    }
}

TEST(Roots, MonotoneInParameters) {
  const auto s = logistic();
  // theta increases with mu, decreases with lambda; beta the reverse.
  const auto a = roots(s, {0.05, 1}), b = roots(s, {0.1, 1}), c = roots(s, {0.1, 2});
  EXPECT_LT(a.theta, b.theta);
  EXPECT_GT(a.beta, b.beta);
  EXPECT_LT(c.theta, b.theta);
  EXPECT_GT(c.beta, b.beta);
}

TEST(Roots, LargeLambdaLimits) {
  const auto r = roots(logistic(), {0.1, 1e6});
  EXPECT_LT(r.theta, 1e-3);
  EXPECT_GT(r.beta, 1 - 1e-3);
}

TEST(Roots, Errors) {
  const auto s = logistic();
  try {
    roots(s, {0.1, 0.3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInOmega);
  }
  try {
    roots(s, {0.1, 0.45});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoTheta);
  }
}
