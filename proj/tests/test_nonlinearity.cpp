#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "bif/nonlinearity.hpp"

using namespace bif;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference g: u^p (1 - (u/K)^q) with hand-written primitive, used to check the class.
double g_ref(double p, double q, double K, double u) { return std::pow(u, p) * (1 - std::pow(u / K, q)); }
double G_ref(double p, double q, double K, double u) {
  return std::pow(u, p + 1) / (p + 1) - std::pow(u, p + q + 1) / ((p + q + 1) * std::pow(K, q));
}

}  // namespace

TEST(GeneralizedLogistic, RejectsBadParameters) {
  EXPECT_THROW(GeneralizedLogistic(1.5, 1, 1), Error);
  EXPECT_THROW(GeneralizedLogistic(0, 1, 1), Error);
  EXPECT_THROW(GeneralizedLogistic(0.5, 0.4, 1), Error);
  EXPECT_THROW(GeneralizedLogistic(1, 1, 0), Error);
  try {
    GeneralizedLogistic(1.5, 1, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("0 < p <= 1"), std::string::npos);
  }
}

TEST(GeneralizedLogistic, ClosedFormsMatchReference) {
  for (auto [p, q, K] : {std::tuple{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}, {1.0, 2.0, 3.0}, {0.3, 0.8, 2.0}}) {
    GeneralizedLogistic n(p, q, K);
    for (int i = 1; i < 40; ++i) {
      const double u = 1.3 * K * i / 40;
      EXPECT_NEAR(n.g(u), g_ref(p, q, K, u), 1e-13 * std::max(1.0, K));
      EXPECT_NEAR(n.G(u), G_ref(p, q, K, u), 1e-13 * std::max(1.0, K * K));
    }
    EXPECT_NO_THROW(validate(n));
  }
}

TEST(GeneralizedLogistic, SlopeAtZero) {
  EXPECT_TRUE(GeneralizedLogistic(1, 1, 1).gprime0().is_finite());
  EXPECT_DOUBLE_EQ(GeneralizedLogistic(1, 1, 1).gprime0().value(), 1.0);
  EXPECT_FALSE(GeneralizedLogistic(0.5, 1, 1).gprime0().is_finite());
  EXPECT_THROW(GPrimeAtZero::finite(-1), Error);
}

TEST(GeneralizedLogistic, GDropKeepsRelativeAccuracy) {
  GeneralizedLogistic n(1, 1, 1);
  const double a = 0.6;
  for (double h : {1e-3, 1e-6, 1e-9, 1e-12}) {
    // G(a) - G(a-h) exactly: h(a - a^2) + h^2 (2a - 1)/2 ... expand the cubic difference directly.
    const double exact = (a * a - (a - h) * (a - h)) / 2 - (a * a * a - (a - h) * (a - h) * (a - h)) / 3;
    const double series = h * (a - a * a) - h * h * (1 - 2 * a) / 2 - h * h * h / 3;
    EXPECT_NEAR(n.G_drop(a, h), series, 1e-12 * std::abs(series)) << h;
    if (h >= 1e-6) {
      EXPECT_NEAR(n.G_drop(a, h), exact, 1e-8 * std::abs(exact));
    }
  }
}

TEST(Characteristics, U0) {
  EXPECT_NEAR(chars::u0(GeneralizedLogistic(1, 1, 1)), 0.5, 1e-12);
  EXPECT_NEAR(chars::u0(GeneralizedLogistic(1, 2, 1)), 1 / std::sqrt(3.0), 1e-12);
  for (auto [p, q, K] : {std::tuple{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}, {1.0, 2.0, 3.0}}) {
    GeneralizedLogistic n(p, q, K);
    const double u = chars::u0(n);
    EXPECT_NEAR(u, n.u0_closed_form(), 1e-11 * K);
    EXPECT_LT(n.g(u + 1e-3 * K), n.g(u));
    EXPECT_LT(n.g(u - 1e-3 * K), n.g(u));
  }
}

TEST(Characteristics, CStar) {
  EXPECT_NEAR(chars::c_star(GeneralizedLogistic(1, 1, 1)), 0.75, 1e-12);
  EXPECT_NEAR(chars::c_star(GeneralizedLogistic(1, 2, 1)), std::sqrt(2.0 / 3.0), 1e-12);
  for (auto [p, q, K] : {std::tuple{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}, {0.3, 0.8, 2.0}}) {
    GeneralizedLogistic n(p, q, K);
    const double c = chars::c_star(n);
    EXPECT_NEAR(c, n.c_star_closed_form(), 1e-11 * K);
    EXPECT_GT(c, chars::u0(n));
    EXPECT_LT(c, K);
  }
}

TEST(Characteristics, CStarL) {
  EXPECT_NEAR(chars::c_star_L(GeneralizedLogistic(1, 1, 1), 5), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(chars::c_star_L(GeneralizedLogistic(1, 1, 1), 0.5), 0.5);
  EXPECT_NEAR(chars::c_star_L(GeneralizedLogistic(1, 2, 1), 5), 0.8164966, 1e-7);
}

TEST(Characteristics, KappaEtaM) {
  GeneralizedLogistic lin(1, 1, 1), sq(0.5, 1, 1);
  EXPECT_NEAR(chars::kappa(lin, 5), kPi * kPi / 100, 1e-15);
  EXPECT_EQ(chars::kappa(sq, 5), 0.0);
  EXPECT_NEAR(chars::kappa(lin, kPi / 2), 1.0, 1e-15);
  EXPECT_NEAR(chars::eta(lin, 1), kPi / 2, 1e-15);
  EXPECT_EQ(chars::eta(sq, 1), 0.0);
  EXPECT_NEAR(chars::eta(lin, 4), kPi / 4, 1e-15);
  EXPECT_EQ(chars::m_sigma_L(lin, 5), 1.0);
  EXPECT_EQ(chars::m_sigma_L(lin, 0.3), 0.3);
  EXPECT_EQ(chars::m_sigma_L(GeneralizedLogistic(1, 1, 2), 2), 2.0);
}

TEST(Validate, RejectsBrokenNonlinearity) {
  struct Convex final : Nonlinearity {
    double g(double u) const override { return u * u * (1 - u); }
    double dg(double u) const override { return 2 * u - 3 * u * u; }
    double d2g(double u) const override { return 2 - 6 * u; }
    double G(double u) const override { return u * u * u / 3 - u * u * u * u / 4; }
    double sigma() const override { return 1; }
    GPrimeAtZero gprime0() const override { return GPrimeAtZero::finite(1); }
  };
  try {
    validate(Convex{});
    FAIL() << "expected InvalidNonlinearity";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidNonlinearity);
    EXPECT_NE(std::string(e.what()).find("g''"), std::string::npos);
  }
}
