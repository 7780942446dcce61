#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "bif/shooting.hpp"
#include "bif/timemap.hpp"

using namespace bif;

namespace {

ProblemSpec logistic() { return ProblemSpec(std::make_shared<GeneralizedLogistic>(1, 1, 1), 5); }

void check_profile(const ProblemSpec& s, ParamPoint pt, double alpha) {
  const Profile p = solve_profile(s, pt, alpha, 200);
  ASSERT_EQ(p.xs.size(), 201u);
  EXPECT_EQ(p.xs.front(), 0.0);
  EXPECT_EQ(p.us.front(), alpha);
  EXPECT_EQ(p.slopes.front(), 0.0);
  EXPECT_EQ(p.x_end, shoot_half_length(s, pt, alpha));
  EXPECT_LE(p.us.back(), 1e-10);
  for (std::size_t i = 1; i < p.us.size(); ++i) EXPECT_LT(p.us[i], p.us[i - 1]) << i;
  const auto& n = s.n();
  auto F = [&](double u) { return pt.lambda * n.G(u) - pt.mu * u; };
  double worst = 0;
  for (std::size_t i = 0; i < p.us.size(); ++i) {
    const double v = p.slopes[i];
    EXPECT_LT(std::abs(v), 1.0);
    const double lhs = 1 / std::sqrt(1 - v * v) - 1;
    worst = std::max(worst, std::abs(lhs - (F(alpha) - F(p.us[i]))));
  }
  EXPECT_LE(worst, 1e-7) << alpha;
}

}  // namespace

TEST(Shooting, AgreesWithQuadrature) {
  const auto s = logistic();
  const double T = time_map(s, {0.1, 1}, 0.5);
  const double x = shoot_half_length(s, {0.1, 1}, 0.5);
  EXPECT_NEAR(x, T, 1e-6 * T);
  EXPECT_NEAR(x, 2.81782251457689419, 1e-8);
}

TEST(Shooting, AtTheta) {
  const auto s = logistic();
  const auto r = roots(s, {0.1, 1});
  EXPECT_NEAR(shoot_half_length(s, {0.1, 1}, r.theta), 3.612682579956591, 1e-7);
}

TEST(Shooting, UnharvestedGrid) {
  const auto s = logistic();
  for (int i = 0; i < 10; ++i) {
    const double lam = 0.2 * std::pow(100.0, i / 9.0);
    for (int j = 0; j < 10; ++j) {
      const double a = 0.05 + 0.1 * j;
      const double T = time_map_zero(s, lam, a);
      EXPECT_NEAR(shoot_half_length(s, {0, lam}, a), T, 1e-6 * std::max(1.0, T)) << lam << " " << a;
    }
  }
}

TEST(Shooting, ProfileInvariants) {
  const auto s = logistic();
  const auto r = roots(s, {0.1, 1});
  for (double f : {0.0, 0.2, 0.5, 0.9}) check_profile(s, {0.1, 1}, r.theta + f * (r.beta - r.theta));
  check_profile(s, {0, 2}, 0.6);
  const ProblemSpec sq(std::make_shared<GeneralizedLogistic>(0.5, 1, 1), 5);
  const auto rq = roots(sq, {0.1, 1});
  check_profile(sq, {0.1, 1}, 0.5 * (rq.theta + rq.beta));
}

TEST(Shooting, Errors) {
  const auto s = logistic();
  auto kind = [&](ParamPoint pt, double a) {
    try {
      shoot_half_length(s, pt, a);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NonFinite;
  };
  EXPECT_EQ(kind({0.1, 1}, 1.2), ErrorKind::OutOfRange);
  // Below theta u turns around before reaching 0.
  EXPECT_EQ(kind({0.1, 1}, 0.15), ErrorKind::EventNotReached);
  EXPECT_THROW(solve_profile(s, {0.1, 1}, 0.5, 1), Error);
}
