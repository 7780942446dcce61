#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bif/shooting.hpp"
#include "bif/timemap.hpp"

using namespace bif;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec logistic(double L = 5) { return ProblemSpec(std::make_shared<GeneralizedLogistic>(1, 1, 1), L); }

// Independent oracle for g = u(1 - u): composite Simpson in s with u = alpha (1 - s^2),
// which removes the inverse square-root singularity at u = alpha.
double simpson_T(double mu, double lambda, double alpha, int n = 20000) {
  auto F = [&](double u) { return lambda * (u * u / 2 - u * u * u / 3) - mu * u; };
  const double Fa = F(alpha);
  auto integrand = [&](double s) {
    if (s == 0) {
      const double fa = lambda * alpha * (1 - alpha) - mu;
      return 2 * alpha / std::sqrt(2 * alpha * fa);
    }
    const double B = Fa - F(alpha * (1 - s * s));
    return 2 * alpha * s * (B + 1) / std::sqrt(B * (B + 2));
  };
  const double h = 1.0 / n;
  double sum = integrand(0) + integrand(1);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * integrand(i * h);
  return sum * h / 3;
}

struct Sample {
  ParamPoint pt;
  double alpha;
};

std::vector<Sample> random_points(const ProblemSpec& s, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> mu_d(0.01, 0.15), fac_d(1.05, 6), frac_d(0.05, 0.95);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    const double mu = mu_d(rng);
    const ParamPoint pt{mu, fac_d(rng) * lambda_mu(s, mu)};
    const auto r = roots(s, pt);
    out.push_back({pt, r.theta + frac_d(rng) * (r.beta - r.theta)});
  }
  return out;
}

}  // namespace

TEST(TimeMap, ReferenceValues) {
  const auto s = logistic();
  const TimeMap tm(s, {0.1, 1});
  EXPECT_NEAR(tm.T(0.5), 2.81782251457689419, 1e-10);
  EXPECT_NEAR(tm.T_at_theta(), 3.612682579956591, 1e-9);
  EXPECT_NEAR(tm.T(0.5), simpson_T(0.1, 1, 0.5), 1e-8);
}

TEST(TimeMap, MatchesShootingOracle) {
  const auto s = logistic();
  const double T = time_map(s, {0.1, 1}, 0.5);
  EXPECT_NEAR(shoot_half_length(s, {0.1, 1}, 0.5), T, 1e-6 * T);
}

TEST(TimeMap, AboveAmplitudeAndAboveUnharvested) {
  const auto s = logistic();
  for (const auto& p : random_points(s, 40, 7)) {
    const double T = time_map(s, p.pt, p.alpha);
    EXPECT_GT(T, p.alpha);
    EXPECT_GT(T, time_map_zero(s, p.pt.lambda, p.alpha));
  }
}

TEST(TimeMap, RangeChecks) {
  const auto s = logistic();
  const TimeMap tm(s, {0.1, 1});
  try {
    tm.T(0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  EXPECT_THROW(tm.T(tm.roots().beta), Error);
}

TEST(TimeMapZero, ReferenceValues) {
  const auto s = logistic();
  EXPECT_NEAR(time_map_zero(s, 1, 0.5), 2.13529314533764877, 1e-10);
  EXPECT_NEAR(time_map_zero(s, 4, 0.9), 1.99813587862326058, 1e-10);
  EXPECT_NEAR(time_map_zero(s, 1, 1e-4), kPi / 2, 1e-3);
  EXPECT_NEAR(time_map_zero(s, 1, 0.5), simpson_T(0, 1, 0.5), 1e-8);
  EXPECT_NEAR(shoot_half_length(s, {0, 1}, 0.5), time_map_zero(s, 1, 0.5), 1e-6 * 2.2);
}

TEST(TimeMapZero, IncreasingInAmplitude) {
  const auto s = logistic();
  double prev = 0;
  for (int i = 1; i < 50; ++i) {
    const double T = time_map_zero(s, 1, i / 50.0);
    EXPECT_GT(T, prev);
    prev = T;
  }
}

// T0 diverges only logarithmically at sigma: about 2.3 per decade at lambda = 1.
TEST(TimeMapZero, LogarithmicDivergenceAtSigma) {
  const auto s = logistic();
  double prev = 0;
  int first_above_2L = 0;
  for (int k = 1; k <= 12; ++k) {
    const double T = time_map_zero(s, 1, 1 - std::pow(10.0, -k));
    EXPECT_GT(T, prev);
    if (k > 3) {
      EXPECT_NEAR(T - prev, std::log(10.0), 0.05);
    }
    if (!first_above_2L && T > 10 * 2) first_above_2L = k;
    prev = T;
  }
  EXPECT_EQ(first_above_2L, 9);
  EXPECT_LT(prev, 10 * 5);
}

TEST(Derivatives, ReferenceValues) {
  const auto s = logistic();
  const TimeMap tm(s, {0.1, 1});
  EXPECT_NEAR(tm.dT_dmu(0.5), 10.8969035365632462, 1e-9);
  EXPECT_NEAR(tm.dT_dlambda(0.5), -2.45713099918498478, 1e-9);
  EXPECT_NEAR(tm.dT_dalpha(0.5), 1.637790062841, 1e-7);
}

TEST(Derivatives, MatchFiniteDifferences) {
  const auto s = logistic();
  const ParamPoint pt{0.1, 1};
  const double a = 0.5, h = 1e-6;
  const double fd_mu = (time_map(s, {0.1 + h * 0.1, 1}, a) - time_map(s, {0.1 - h * 0.1, 1}, a)) / (2 * h * 0.1);
  const double fd_la = (time_map(s, {0.1, 1 + h}, a) - time_map(s, {0.1, 1 - h}, a)) / (2 * h);
  const double fd_al = (time_map(s, pt, a + h * a) - time_map(s, pt, a - h * a)) / (2 * h * a);
  EXPECT_NEAR(dT_dmu(s, pt, a), fd_mu, 1e-4 * std::abs(fd_mu));
  EXPECT_NEAR(dT_dlambda(s, pt, a), fd_la, 1e-4 * std::abs(fd_la));
  EXPECT_NEAR(dT_dalpha(s, pt, a), fd_al, 1e-4 * std::abs(fd_al));
}

TEST(Derivatives, Signs) {
  const auto s = logistic();
  for (const auto& p : random_points(s, 50, 11)) {
    const TimeMap tm(s, p.pt);
    EXPECT_GT(tm.dT_dmu(p.alpha), 0);
    EXPECT_LT(tm.dT_dlambda(p.alpha), 0);
  }
}

TEST(Derivatives, AlphaShape) {
  const auto s = logistic();
  const TimeMap tm(s, {0.1, 1});
  const auto& r = tm.roots();
  const double w = r.beta - r.theta;
  EXPECT_LT(tm.dT_dalpha(r.theta + 1e-8 * w), -100);
  EXPECT_GT(tm.dT_dalpha(r.beta - 1e-6 * w), 0);
  const double at = tm.alpha_tilde();
  EXPECT_LE(std::abs(tm.dT_dalpha(at)), 1e-8 * tm.T(at));
}

TEST(AlphaTilde, ReferenceValue) {
  const auto s = logistic();
  const TimeMap tm(s, {0.1, 1});
  const double at = alpha_tilde(s, {0.1, 1});
  EXPECT_NEAR(at, 0.389249136045705004, 1e-10);
  EXPECT_GT(at, tm.roots().theta);
  EXPECT_LT(at, tm.roots().beta);
  EXPECT_NEAR(tm.alpha_tilde(false), at, 1e-10);
}

TEST(AlphaTilde, Limits) {
  const auto s = logistic();
  EXPECT_LT(alpha_tilde(s, {1e-6, 1}), 0.05);
  EXPECT_NEAR(alpha_tilde(s, {0.1, 1.0001 * lambda_mu(s, 0.1)}), 0.75, 0.05);
}

TEST(TimeMap, SmallHarvestLimits) {
  const auto s = logistic();
  const TimeMap tm(s, {1e-6, 1});
  EXPECT_NEAR(tm.T_at_theta(), kPi, 1e-2);
  EXPECT_NEAR(tm.T(tm.alpha_tilde()), kPi / 2, 1e-2);
}

// min T grows like a logarithm of 1/(lambda - lambda_mu): a steady gain per decade.
TEST(TimeMap, MinimumDivergesAtLambdaMu) {
  const auto s = logistic();
  double prev = 0;
  for (int k = 2; k <= 8; ++k) {
    const TimeMap tm(s, {0.1, lambda_mu(s, 0.1) * (1 + std::pow(10.0, -k))});
    const double m = tm.T(tm.alpha_tilde());
    if (k > 2) {
      EXPECT_GT(m - prev, 2.0) << k;
    }
    prev = m;
  }
}

TEST(GammaLambda, AgainstBisectionOracle) {
  const auto s = logistic();
  double lo = 0.01, hi = 0.999999;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (simpson_T(0, 1, mid) < 5 ? lo : hi) = mid;
  }
  const double g = gamma_lambda(s, 1);
  EXPECT_GT(g, 0);
  EXPECT_LT(g, 1);
  EXPECT_NEAR(g, 0.5 * (lo + hi), 1e-8);
  EXPECT_NEAR(time_map_zero(s, 1, g), 5, 1e-9);
}

TEST(GammaLambda, Regimes) {
  try {
    gamma_lambda(logistic(1.5), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoGamma);
  }
  EXPECT_NEAR(gamma_lambda(logistic(), 1e6), 1.0, 1e-3);
}

TEST(TimeMap, InfiniteSlopeAgreesWithShooting) {
  const ProblemSpec s(std::make_shared<GeneralizedLogistic>(0.5, 1, 1), 5);
  for (double f : {0.1, 0.5, 0.9}) {
    const ParamPoint pt{0.1, 1};
    const auto r = roots(s, pt);
    const double a = r.theta + f * (r.beta - r.theta);
    const double T = time_map(s, pt, a);
    EXPECT_NEAR(shoot_half_length(s, pt, a), T, 1e-6 * std::max(1.0, T));
  }
}
