#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "bif/error.hpp"
#include "bif/numerics.hpp"

namespace bif {

/// Value of g'(0+): a positive finite slope or +infinity.
class GPrimeAtZero {
 public:
  static GPrimeAtZero finite(double v) {
    if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidNonlinearity, "finite g'(0+) must be positive");
    return GPrimeAtZero(v);
  }
  static GPrimeAtZero infinite() { return GPrimeAtZero(std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(value_); }
  double value() const { return value_; }

 private:
  explicit GPrimeAtZero(double v) : value_(v) {}
  double value_;
};

/// Growth law g on [0, inf) with g(0) = 0, a single positive zero sigma,
/// g > 0 on (0, sigma), g < 0 beyond it, and g'' < 0 on (0, sigma).
class Nonlinearity {
 public:
  virtual ~Nonlinearity() = default;

  virtual double g(double u) const = 0;
  virtual double dg(double u) const = 0;
  virtual double d2g(double u) const = 0;
  /// Primitive with G(0) = 0.
  virtual double G(double u) const = 0;
  virtual double sigma() const = 0;
  virtual GPrimeAtZero gprime0() const = 0;

  /// G(a) - G(a - h) for 0 <= h <= a. Small h goes through a third-order
  /// Taylor expansion about a, which keeps full relative accuracy where the
  /// direct difference cancels.
  double G_drop(double a, double h) const {
    if (h < 1e-4 * a) return h * (g(a) - h * (0.5 * dg(a) - h * d2g(a) / 6.0));
    return G(a) - G(a - h);
  }
};

/// g(u) = u^p [1 - (u/K)^q], 0 < p <= 1, p + q >= 1, K > 0.
class GeneralizedLogistic final : public Nonlinearity {
 public:
  GeneralizedLogistic(double p, double q, double K) : p_(p), q_(q), K_(K) {
    if (!(p > 0 && p <= 1)) throw Error(ErrorKind::InvalidConfig, bound_message("p", p, "0 < p <= 1"));
    if (!(p + q >= 1)) throw Error(ErrorKind::InvalidConfig, bound_message("q", q, "p + q >= 1"));
    if (!(K > 0)) throw Error(ErrorKind::InvalidConfig, bound_message("K", K, "K > 0"));
    Kq_ = std::pow(K, q);
  }

  double p() const { return p_; }
  double q() const { return q_; }
  double K() const { return K_; }

  double g(double u) const override {
    if (u <= 0) return 0;
    return pow_p(u) * (1 - ratio_q(u));
  }
  double dg(double u) const override {
    if (u <= 0) return p_ == 1 ? 1.0 : std::numeric_limits<double>::infinity();
    return pow_p(u) / u * (p_ - (p_ + q_) * ratio_q(u));
  }
  double d2g(double u) const override {
    if (u <= 0) return -std::numeric_limits<double>::infinity();
    return pow_p(u) / (u * u) * (p_ * (p_ - 1) - (p_ + q_) * (p_ + q_ - 1) * ratio_q(u));
  }
  double G(double u) const override {
    if (u <= 0) return 0;
    return pow_p(u) * u * (1 / (p_ + 1) - ratio_q(u) / (p_ + q_ + 1));
  }
  double sigma() const override { return K_; }
  GPrimeAtZero gprime0() const override {
    return p_ == 1 ? GPrimeAtZero::finite(p_) : GPrimeAtZero::infinite();
  }

  /// Maximizer of g: K (p/(p+q))^(1/q).
  double u0_closed_form() const { return K_ * std::pow(p_ / (p_ + q_), 1 / q_); }
  /// Peak of G(u)/u: K [p(p+q+1)/((p+1)(p+q))]^(1/q).
  double c_star_closed_form() const {
    return K_ * std::pow(p_ * (p_ + q_ + 1) / ((p_ + 1) * (p_ + q_)), 1 / q_);
  }

 private:
  static std::string bound_message(const char* name, double v, const char* bound) {
    std::ostringstream os;
    os << name << " = " << v << " violates " << bound;
    return os.str();
  }
  double pow_p(double u) const { return p_ == 1 ? u : std::pow(u, p_); }
  double ratio_q(double u) const {
    if (q_ == 1) return u / K_;
    if (q_ == 2) return (u / K_) * (u / K_);
    return std::pow(u, q_) / Kq_;
  }

  double p_, q_, K_, Kq_;
};

/// Checks the standing hypotheses on a sample of interior points; throws
/// InvalidNonlinearity naming the first violated property.
inline void validate(const Nonlinearity& n, int samples = 1000) {
  const double s = n.sigma();
  auto fail = [](const std::string& msg, double u) {
    std::ostringstream os;
    os.precision(17);
    os << msg << " at u = " << u;
    throw Error(ErrorKind::InvalidNonlinearity, os.str());
  };
  if (!(s > 0) || !std::isfinite(s)) fail("sigma must be positive", s);
  double gmax = 0;
  for (int i = 1; i < samples; ++i) gmax = std::max(gmax, n.g(s * i / samples));
  if (std::abs(n.g(0)) > 1e-12 * std::max(1.0, gmax)) fail("g(0) != 0", 0);
  if (std::abs(n.g(s)) > 1e-12 * std::max(1.0, gmax)) fail("g(sigma) != 0", s);
  const bool infinite_slope = !n.gprime0().is_finite();
  for (int i = 1; i < samples; ++i) {
    const double u = s * i / samples;
    if (!(n.g(u) > 0)) fail("g must be positive on (0, sigma)", u);
    if (!(n.g(s + u) < 0)) fail("g must be negative beyond sigma", s + u);
    if (infinite_slope && i < samples / 100) continue;
    if (!(n.d2g(u) < 0)) fail("g'' must be negative on (0, sigma)", u);
  }
  const double scale = gmax / s;
  for (int i = 1; i < 50; ++i) {
    const double u = s * (0.02 + 0.96 * i / 50.0);
    const double h = 1e-5 * u;
    const double fd1 = (n.g(u + h) - n.g(u - h)) / (2 * h);
    const double fd2 = (n.dg(u + h) - n.dg(u - h)) / (2 * h);
    if (std::abs(fd1 - n.dg(u)) > 1e-6 * std::max(std::abs(n.dg(u)), scale)) fail("dg disagrees with finite differences of g", u);
    if (std::abs(fd2 - n.d2g(u)) > 1e-6 * std::max(std::abs(n.d2g(u)), scale / s)) fail("d2g disagrees with finite differences of dg", u);
  }
  Tolerances tol;
  tol.quad_rel = 1e-13;
  for (int i = 1; i <= 20; ++i) {
    const double u = s * i / 20.0;
    const double ref = u * integrate01([&](double t) { return n.g(u * t); }, tol).value;
    if (std::abs(ref - n.G(u)) > 1e-10 * std::max(std::abs(ref), 1e-300)) fail("G is not a primitive of g", u);
  }
}

/// Characteristic constants that only depend on g (and L).
namespace chars {

/// Unique maximizer of g on (0, sigma).
inline double u0(const Nonlinearity& n, const Tolerances& tol = {}) {
  const double s = n.sigma();
  constexpr double eps = 1e-9;
  auto dg = [&](double u) { return n.dg(u); };
  const double a = eps * s, b = s * (1 - eps);
  if (!(dg(a) > 0 && dg(b) < 0))
    throw Error(ErrorKind::InvalidNonlinearity, "g' does not change sign on (eps sigma, sigma(1-eps))");
  return find_root(dg, a, b, tol);
}

/// Unique c* in (u0, sigma) with G(c*) = c* g(c*).
inline double c_star(const Nonlinearity& n, const Tolerances& tol = {}) {
  const double s = n.sigma();
  constexpr double eps = 1e-9;
  const double u = u0(n, tol);
  auto h = [&](double c) { return n.G(c) - c * n.g(c); };
  const double a = u * (1 + eps), b = s * (1 - eps);
  if (!(h(a) < 0 && h(b) > 0)) throw Error(ErrorKind::InvalidNonlinearity, "no peak of G(u)/u in (u0, sigma)");
  return find_root(h, a, b, tol);
}

inline double c_star_L(const Nonlinearity& n, double L, const Tolerances& tol = {}) {
  return std::min(c_star(n, tol), L);
}

/// pi^2 / (4 g'(0+) L^2), or 0 when g'(0+) is infinite.
inline double kappa(const Nonlinearity& n, double L) {
  const auto s = n.gprime0();
  if (!s.is_finite()) return 0;
  return std::numbers::pi * std::numbers::pi / (4 * s.value() * L * L);
}

/// pi / (2 sqrt(lambda g'(0+))), or 0 when g'(0+) is infinite.
inline double eta(const Nonlinearity& n, double lambda) {
  const auto s = n.gprime0();
  if (!s.is_finite()) return 0;
  return std::numbers::pi / (2 * std::sqrt(lambda * s.value()));
}

inline double m_sigma_L(const Nonlinearity& n, double L) { return std::min(n.sigma(), L); }

}  // namespace chars

}  // namespace bif
