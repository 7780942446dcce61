#pragma once

// Time map T(alpha) = int_0^1 alpha (B + 1) / sqrt(B^2 + 2B) dt with
// B = F(alpha) - F(alpha t): the half-length of the even positive solution
// with maximum alpha. Positive solutions are exactly the roots of T = L.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bif/error.hpp"
#include "bif/numerics.hpp"
#include "bif/problem.hpp"

namespace bif {

struct TimeMapSample {
  double alpha = 0;
  double T = 0;
  double dT_dalpha = 0;
  bool converged = false;
  bool clamped = false;
};

namespace detail {

// (B + 1) / sqrt(B^2 + 2B) and 1 / (B^2 + 2B)^(3/2).
inline double kernel(double B) {
  const double q = B * (B + 2);
  return (B + 1) / std::sqrt(q);
}
inline double kernel_d(double B) {
  const double q = B * (B + 2);
  return 1.0 / (q * std::sqrt(q));
}

// Below this value of 1 - t, differences at alpha and alpha t go through
// Taylor expansions about alpha.
inline constexpr double kTaylorSwitch = 1e-4;
inline constexpr double kTaylorSwitchDeriv = 1e-5;

}  // namespace detail

/// Time map at a fixed (mu, lambda) in Omega. Caches the root structure.
class TimeMap {
 public:
  TimeMap(const ProblemSpec& spec, ParamPoint pt) : spec_(spec), pt_(pt), r_(bif::roots(spec, pt)) {}
  TimeMap(const ProblemSpec& spec, ParamPoint pt, const RootStructure& r) : spec_(spec), pt_(pt), r_(r) {}

  const ProblemSpec& spec() const { return spec_; }
  ParamPoint point() const { return pt_; }
  const RootStructure& roots() const { return r_; }

  /// T on [theta, beta). At alpha = theta the value is finite.
  double T(double alpha) const {
    const Amp A = amp(admit(alpha));
    return integrate01([&](double t, double tc) { return A.a * detail::kernel(B(A, t, tc)); }, spec_.tol()).value;
  }

  double T_at_theta() const { return T(r_.theta); }

  /// dT/dmu = int_0^alpha (alpha - u) / (B^2 + 2B)^(3/2) du > 0.
  double dT_dmu(double alpha) const {
    const Amp A = amp(interior(alpha));
    return integrate01(
               [&](double t, double tc) {
                 const double h = A.a * tc;
                 return A.a * h * detail::kernel_d(B(A, t, tc));
               },
               spec_.tol())
        .value;
  }

  /// dT/dlambda = -int_0^alpha (G(alpha) - G(u)) / (B^2 + 2B)^(3/2) du < 0.
  double dT_dlambda(double alpha) const {
    const Amp A = amp(interior(alpha));
    const auto& n = spec_.n();
    return integrate01(
               [&](double t, double tc) {
                 const double h = A.a * tc;
                 return -A.a * n.G_drop(A.a, h) * detail::kernel_d(B(A, t, tc));
               },
               spec_.tol())
        .value;
  }

  /// dT/dalpha by differentiating the t-form under the integral sign, with
  /// d/dalpha B(alpha, alpha t) = f(alpha) - t f(alpha t). Falls back to a
  /// central difference of T when the quadrature does not converge.
  double dT_dalpha(double alpha) const {
    const double a = interior(alpha);
    try {
      return dT_dalpha_quad(a);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NonFinite) throw;
    }
    const double room = std::min(a - r_.theta, r_.beta - a);
    const double step = std::min(spec_.tol().fd_step_rel * a, 0.5 * room);
    return (T(a + step) - T(a - step)) / (2 * step);
  }

  /// Full sample at alpha, including whether the interior clamp was applied.
  TimeMapSample sample(double alpha) const {
    TimeMapSample s;
    s.alpha = alpha;
    s.clamped = interior(alpha) != alpha;
    try {
      s.T = T(alpha);
      s.dT_dalpha = dT_dalpha(alpha);
      s.converged = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NonFinite) throw;
      s.converged = false;
    }
    return s;
  }

  /// Unique interior minimizer of T on (theta, beta). With verify_shape the
  /// derivative is scanned on 64 points log-clustered at both ends and exactly
  /// one sign change is required; otherwise the bracket comes from a short
  /// search toward beta.
  double alpha_tilde(bool verify_shape = true) const {
    const double lo = r_.theta + near_theta();
    double a = 0, b = 0;
    if (verify_shape) {
      const auto xs = scan_grid();
      std::vector<double> d(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) d[i] = dT_dalpha(xs[i]);
      int changes = 0;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if ((d[i] < 0) != (d[i + 1] < 0)) {
          ++changes;
          a = xs[i];
          b = xs[i + 1];
        }
      }
      // Minimizer below the first probe: nothing left to verify at this resolution.
      if (changes == 0 && !(d.front() < 0)) return flat_minimizer(lo);
      if (changes != 1 || !(d.front() < 0)) {
        std::ostringstream os;
        os << "dT/dalpha has " << changes << " sign changes on the scan of (theta, beta) at (mu, lambda) = (" << pt_.mu
           << ", " << pt_.lambda << ")";
        throw Error(ErrorKind::ShapeViolation, os.str());
      }
    } else {
      a = lo;
      if (!(dT_dalpha(a) < 0)) return flat_minimizer(lo);
      const double w = r_.beta - r_.theta;
      double x = 0.5;
      for (int k = 0; k < 40; ++k) {
        const double c = r_.theta + x * w;
        if (dT_dalpha(c) > 0) {
          b = c;
          break;
        }
        a = c;
        x = 1 - 0.5 * (1 - x);
        if (k == 39) throw Error(ErrorKind::ShapeViolation, "dT/dalpha stays negative up to beta");
      }
    }
    return find_root([&](double x) { return dT_dalpha(x); }, a, b, spec_.tol());
  }

  /// Minimizer of T on [theta, lo] where lo - theta is at the rounding floor.
  double flat_minimizer(double lo) const {
    const double span = lo - r_.theta;
    return r_.theta + span * minimize([&](double x) { return T(r_.theta + span * x); }, 0.0, 1.0, spec_.tol()).x;
  }

  /// Scan abscissas: 32 points log-spaced from theta + near_theta()
  /// toward the middle and 32 mirrored ones from the middle to beta - 1e-9 w.
  std::vector<double> scan_grid() const {
    const double w = r_.beta - r_.theta;
    const double d = near_theta();
    std::vector<double> out;
    for (int i = 0; i < 32; ++i) out.push_back(r_.theta + d * std::pow(0.5 * w / d, i / 32.0));
    for (int i = 31; i >= 0; --i) out.push_back(r_.beta - 1e-9 * std::pow(0.5 / 1e-9, i / 31.0) * w);
    return out;
  }

  /// Offset from theta of the first probe; theta itself can be far smaller
  /// than the window (mu -> 0 with g'(0+) infinite). Never below the offset
  /// where F(alpha) - F(theta) ~ f(theta)(alpha - theta) clears rounding in F,
  /// which matters as lambda -> lambda_mu and f(theta) -> 0.
  double near_theta() const {
    const double w = r_.beta - r_.theta;
    const double fth = f(r_.theta);
    const double scale = pt_.lambda * spec_.n().G(r_.theta) + pt_.mu * r_.theta;
    const double floor = fth > 0 ? 1e3 * std::numeric_limits<double>::epsilon() * scale / fth : 0.25 * w;
    return std::min(std::max(1e-9 * std::min(w, r_.theta), floor), 0.25 * w);
  }

  /// alpha restricted to [theta + 1e-12 w, beta - 1e-12 w].
  double interior(double alpha) const {
    const double w = r_.beta - r_.theta;
    return std::clamp(alpha, r_.theta + 1e-12 * w, r_.beta - 1e-12 * w);
  }

 private:
  double F(double u) const { return pt_.lambda * spec_.n().G(u) - pt_.mu * u; }
  double f(double u) const { return pt_.lambda * spec_.n().g(u) - pt_.mu; }

  // Amplitudes a hair below the computed theta (root-finder tolerance) are
  // theta itself.
  double admit(double alpha) const {
    if (alpha < r_.theta && alpha >= r_.theta * (1 - 1e-10)) return alpha;
    if (!(alpha >= r_.theta) || !(alpha < r_.beta)) {
      std::ostringstream os;
      os.precision(17);
      os << "alpha = " << alpha << " outside [theta, beta) = [" << r_.theta << ", " << r_.beta << ")";
      throw Error(ErrorKind::OutOfRange, os.str());
    }
    return alpha;
  }

  // F(alpha) >= 0 on the admitted range; rounding-level values at theta (and
  // negative values from the root tolerance) are snapped to zero.
  double F_at(double a) const {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double Fa = F(a);
    if (a <= r_.theta || Fa <= 8 * eps * (pt_.lambda * spec_.n().G(a) + pt_.mu * a)) return 0.0;
    return Fa;
  }

  // Per-amplitude data shared by the integrands. fa is f(alpha) floored at 0:
  // below beta it is positive, and rounding must not make B negative.
  struct Amp {
    double a, Fa, fa, dga, d2ga;
  };
  Amp amp(double a) const {
    const auto& n = spec_.n();
    return {a, F_at(a), std::max(f(a), 0.0), n.dg(a), n.d2g(a)};
  }

  // B(alpha, alpha t); near t = 1 a Taylor expansion in h = alpha (1 - t).
  double B(const Amp& A, double t, double tc) const {
    if (tc >= detail::kTaylorSwitch) return A.Fa - F(A.a * t);
    const double h = A.a * tc;
    return h * (A.fa - pt_.lambda * h * (0.5 * A.dga - h * A.d2ga / 6.0));
  }

  double dT_dalpha_quad(double a) const {
    const Amp A = amp(a);
    return integrate01(
               [&](double t, double tc) {
                 const double b = B(A, t, tc);
                 const double fat = f(a * t);
                 double num;
                 if (tc < detail::kTaylorSwitchDeriv) {
                   const double h = a * tc;
                   num = pt_.lambda * h * (A.dga - 0.5 * h * A.d2ga) + tc * fat;
                 } else {
                   num = A.fa - t * fat;
                 }
                 return detail::kernel(b) - a * num * detail::kernel_d(b);
               },
               spec_.tol())
        .value;
  }

  ProblemSpec spec_;
  ParamPoint pt_;
  RootStructure r_;
};

inline double time_map(const ProblemSpec& s, ParamPoint pt, double alpha) { return TimeMap(s, pt).T(alpha); }
inline double dT_dmu(const ProblemSpec& s, ParamPoint pt, double alpha) { return TimeMap(s, pt).dT_dmu(alpha); }
inline double dT_dlambda(const ProblemSpec& s, ParamPoint pt, double alpha) {
  return TimeMap(s, pt).dT_dlambda(alpha);
}
inline double dT_dalpha(const ProblemSpec& s, ParamPoint pt, double alpha) { return TimeMap(s, pt).dT_dalpha(alpha); }
inline double alpha_tilde(const ProblemSpec& s, ParamPoint pt) { return TimeMap(s, pt).alpha_tilde(true); }

/// Time map of the unharvested problem on (0, sigma).
inline double time_map_zero(const ProblemSpec& s, double lambda, double alpha) {
  if (!(alpha > 0) || !(alpha < s.sigma()) || !(lambda > 0)) {
    std::ostringstream os;
    os.precision(17);
    os << "time_map_zero needs 0 < alpha < sigma and lambda > 0 (alpha = " << alpha << ", lambda = " << lambda << ")";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const auto& n = s.n();
  return integrate01(
             [&](double, double tc) { return alpha * detail::kernel(lambda * n.G_drop(alpha, alpha * tc)); }, s.tol())
      .value;
}

/// The amplitude with T0(gamma) = L; exists iff L > eta(lambda).
inline double gamma_lambda(const ProblemSpec& s, double lambda) {
  const double L = s.L();
  if (!(L > s.eta(lambda))) {
    std::ostringstream os;
    os << "L = " << L << " <= eta = " << s.eta(lambda) << " at lambda = " << lambda;
    throw Error(ErrorKind::NoGamma, os.str());
  }
  const double sig = s.sigma();
  auto h = [&](double a) { return time_map_zero(s, lambda, a) - L; };
  double lo = 0.5 * sig, hi = 0.5 * sig;
  if (h(lo) < 0) {
    bool found = false;
    for (int k = 2; k <= 52; ++k) {
      const double a = sig * (1 - std::ldexp(1.0, -k));
      if (a >= sig) break;
      if (h(a) >= 0) {
        hi = a;
        found = true;
        break;
      }
      lo = a;
    }
    // T0 diverges only logarithmically at sigma; past the last representable
    // amplitude the root is indistinguishable from lo.
    if (!found) return lo;
  } else {
    for (int k = 1;; ++k) {
      const double a = 0.5 * sig * std::ldexp(1.0, -k);
      if (h(a) < 0) {
        lo = a;
        break;
      }
      hi = a;
      if (k > 1000) throw Error(ErrorKind::NoGamma, "T0 stays above L as alpha -> 0");
    }
  }
  return find_root(h, lo, hi, s.tol());
}

}  // namespace bif
