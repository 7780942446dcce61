#pragma once

// Scalar numerics shared by every module: tanh-sinh quadrature on (0,1),
// Brent root finding, Brent minimization and geometric bracket expansion.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "bif/error.hpp"

namespace bif {

struct Tolerances {
  double quad_rel = 1e-10;
  double root_rel = 1e-12;
  double fd_step_rel = 1e-6;
  int level_cap = 12;

  void validate() const {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (!(quad_rel >= 100 * eps)) throw Error(ErrorKind::InvalidConfig, "tol.quad_rel must be >= 100*machine epsilon");
    if (!(root_rel > 0)) throw Error(ErrorKind::InvalidConfig, "tol.root_rel must be positive");
    if (!(fd_step_rel > 0)) throw Error(ErrorKind::InvalidConfig, "tol.fd_step_rel must be positive");
    if (level_cap < 1 || level_cap > kMaxQuadLevel)
      throw Error(ErrorKind::InvalidConfig, "tol.level_cap must be in [1, 16]");
  }

  static constexpr int kMaxQuadLevel = 16;
};

struct QuadResult {
  double value = 0;
  double est_error = 0;
  int levels_used = 0;
};

namespace detail {

struct TanhSinhNode {
  double t;   // abscissa in (0,1)
  double tc;  // 1 - t, computed without cancellation
  double w;   // dt/dtau
};

inline constexpr double kTanhSinhTauMax = 5.0;

// Level 0 holds the integer nodes; level k >= 1 holds the odd multiples of 2^-k.
inline std::vector<TanhSinhNode> build_tanh_sinh_level(int level) {
  std::vector<TanhSinhNode> nodes;
  const double h = std::ldexp(1.0, -level);
  auto push = [&](double tau) {
    const double s = 0.5 * std::numbers::pi * std::sinh(std::abs(tau));
    const double e = std::exp(-2.0 * s);
    const double big = 1.0 / (1.0 + e);
    const double small = e / (1.0 + e);
    const double w = std::numbers::pi * std::cosh(tau) * e / ((1.0 + e) * (1.0 + e));
    if (tau >= 0)
      nodes.push_back({big, small, w});
    else
      nodes.push_back({small, big, w});
  };
  if (level == 0) {
    for (int j = 0; j <= static_cast<int>(kTanhSinhTauMax); ++j) {
      push(j);
      if (j != 0) push(-j);
    }
  } else {
    for (long j = 0;; ++j) {
      const double tau = (2 * j + 1) * h;
      if (tau > kTanhSinhTauMax) break;
      push(tau);
      push(-tau);
    }
  }
  return nodes;
}

inline const std::vector<TanhSinhNode>& tanh_sinh_level(int level) {
  static std::array<std::once_flag, Tolerances::kMaxQuadLevel + 1> flags;
  static std::array<std::vector<TanhSinhNode>, Tolerances::kMaxQuadLevel + 1> tables;
  std::call_once(flags[level], [level] { tables[level] = build_tanh_sinh_level(level); });
  return tables[level];
}

template <class F>
double eval_at(F& f, double t, double tc) {
  if constexpr (std::invocable<F&, double, double>)
    return f(t, tc);
  else
    return f(t);
}

}  // namespace detail

/// Tanh-sinh rule on (0,1). The integrand may be called as f(t) or f(t, 1-t);
/// the two-argument form receives the complement without cancellation, which
/// matters for singularities at t = 1.
template <class F>
QuadResult integrate01(F&& f, const Tolerances& tol) {
  constexpr int kMinLevel = 1;
  const int cap = std::clamp(tol.level_cap, 1, Tolerances::kMaxQuadLevel);
  double sum = 0;
  double prev = 0;
  QuadResult r;
  for (int k = 0; k <= cap; ++k) {
    for (const auto& n : detail::tanh_sinh_level(k)) {
      const double v = detail::eval_at(f, n.t, n.tc);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand returned " << v << " at t=" << n.t << " (1-t=" << n.tc << ")";
        throw Error(ErrorKind::NonFinite, os.str());
      }
      sum += n.w * v;
    }
    r.value = std::ldexp(sum, -k);
    r.levels_used = k;
    if (k > 0) {
      r.est_error = std::abs(r.value - prev);
      if (k >= std::min(kMinLevel, cap) && r.est_error <= tol.quad_rel * std::max(1.0, std::abs(r.value))) return r;
    }
    prev = r.value;
  }
  if (r.est_error > 1e3 * tol.quad_rel * std::max(1.0, std::abs(r.value))) {
    std::ostringstream os;
    os.precision(6);
    os << "tanh-sinh did not converge in " << cap << " levels (value " << r.value << ", est error " << r.est_error
       << ")";
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return r;
}

/// Brent's method on a sign-changing bracket. Terminates when the bracket is
/// below root_rel * max(|x|, x_scale); pass x_scale = 1 for the absolute floor.
template <class F>
double find_root(F&& f, double a, double b, const Tolerances& tol, double x_scale = 0.0) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) throw Error(ErrorKind::NonFinite, "find_root: non-finite value at bracket end");
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) {
    std::ostringstream os;
    os.precision(17);
    os << "f(" << a << ")=" << fa << " and f(" << b << ")=" << fb << " have the same sign";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 400; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2 * eps * std::abs(b) + 0.5 * tol.root_rel * std::max(std::abs(b), x_scale);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2 * xm * s;
        q = 1 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2 * p < std::min(3 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (!std::isfinite(fb)) throw Error(ErrorKind::NonFinite, "find_root: non-finite function value");
  }
  return b;
}

struct MinResult {
  double x;
  double fx;
};

/// Brent's golden-section/parabolic minimizer on (a, b). Width tolerance is
/// sqrt(root_rel) * max(1, |x|).
template <class F>
MinResult minimize(F&& f, double a, double b, const Tolerances& tol) {
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double rel = std::sqrt(tol.root_rel);
  if (a > b) std::swap(a, b);
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0, e = 0;
  for (int iter = 0; iter < 500; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = rel * std::max(1.0, std::abs(x)) / 3.0;
    const double tol2 = 2 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

enum class Direction { Up, Down };

/// Geometric search from x0 > 0 (multiplying or dividing by factor) for a
/// sign change of f. Returns an ordered bracket (a, b) with f(a) f(b) <= 0.
template <class F>
std::pair<double, double> expand_bracket(F&& f, double x0, Direction dir, double factor = 2.0, int cap = 60) {
  if (!(x0 > 0) || !(factor > 1)) throw Error(ErrorKind::OutOfRange, "expand_bracket needs x0 > 0 and factor > 1");
  double x = x0;
  double fx = f(x);
  if (!std::isfinite(fx)) throw Error(ErrorKind::NonFinite, "expand_bracket: non-finite value at start");
  for (int k = 0; k < cap; ++k) {
    const double xn = dir == Direction::Up ? x * factor : x / factor;
    const double fn = f(xn);
    if (!std::isfinite(fn)) throw Error(ErrorKind::NonFinite, "expand_bracket: non-finite value along ray");
    if (fx == 0 || fn == 0 || (fx > 0) != (fn > 0)) return {std::min(x, xn), std::max(x, xn)};
    x = xn;
    fx = fn;
  }
  std::ostringstream os;
  os.precision(6);
  os << "no sign change after " << cap << " geometric steps from " << x0;
  throw Error(ErrorKind::NoSignChange, os.str());
}

}  // namespace bif
