#pragma once

// Bifurcation curves built on the time map: the auxiliary integral Phi and its
// inverses, the thresholds lambda_bar / lambda_star / mu_bar / mu_star, curve
// tracing, the bifurcation set, solution counting and region labels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bif/error.hpp"
#include "bif/numerics.hpp"
#include "bif/parallel.hpp"
#include "bif/problem.hpp"
#include "bif/timemap.hpp"

namespace bif {

enum class CurveKind { S_mu, Sigma_lambda, S_zero, B1, B2, C1, C2 };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::S_mu: return "S_mu";
    case CurveKind::Sigma_lambda: return "Sigma_lambda";
    case CurveKind::S_zero: return "S_zero";
    case CurveKind::B1: return "B1";
    case CurveKind::B2: return "B2";
    case CurveKind::C1: return "C1";
    case CurveKind::C2: return "C2";
  }
  return "?";
}

namespace flag {
inline constexpr unsigned start = 1;
inline constexpr unsigned turning = 2;
inline constexpr unsigned clamped = 4;
}  // namespace flag

/// One point of a curve. param is lambda on S curves and mu on Sigma curves.
/// On B/C curves param is lambda and mu holds the abscissa.
struct CurvePoint {
  double param = 0;
  double alpha = 0;
  double mu = 0;
  unsigned flags = 0;

  bool has(unsigned f) const { return (flags & f) != 0; }
};

struct Curve {
  CurveKind kind = CurveKind::S_mu;
  double fixed_param = 0;
  std::vector<CurvePoint> points;
  std::optional<std::size_t> turning_index;
  // Parabolic refinement of the turning point through its two neighbours.
  std::optional<CurvePoint> turning_refined;
};

enum class RegionLabel { M0, M1, M2, OnB1, OnB2 };

inline const char* to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::M0: return "M0";
    case RegionLabel::M1: return "M1";
    case RegionLabel::M2: return "M2";
    case RegionLabel::OnB1: return "OnB1";
    case RegionLabel::OnB2: return "OnB2";
  }
  return "?";
}

struct Region {
  RegionLabel label = RegionLabel::M0;
  int multiplicity = 0;
  double lambda_star = 0;
  double lambda_bar = 0;
};

/// A threshold together with the amplitude where it is attained.
struct Threshold {
  double value = 0;
  double alpha = 0;
};

namespace detail {

[[noreturn]] inline void out_of_range(const std::string& what, double v) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << v << ")";
  throw Error(ErrorKind::OutOfRange, os.str());
}

// Chebyshev-spaced points on [a, b], clustered toward both ends.
inline std::vector<double> cheb_grid(double a, double b, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = a + (b - a) * 0.5 * (1 - std::cos(std::numbers::pi * i / (n - 1)));
  xs.front() = a;
  xs.back() = b;
  return xs;
}

// Root of a monotone h on (lo_end, hi_end) where the sign at one end is
// known; probes x = hi_end - (hi_end - lo_end) 2^-k toward hi_end. Returns
// the probe where h first has sign `want`, or nullopt.
template <class H>
std::optional<std::pair<double, double>> approach(H&& h, double from, double to, bool want_positive, int cap = 60) {
  double prev = from;
  for (int k = 1; k <= cap; ++k) {
    const double x = to - (to - from) * std::ldexp(1.0, -k);
    if (x == prev || x == to) break;
    const double v = h(x);
    if ((v > 0) == want_positive) return std::make_pair(prev, x);
    prev = x;
  }
  return std::nullopt;
}

// Shrinks [neg, sing] where h(neg) < 0 and h is +inf at sing until the end
// next to sing has a finite positive value. Returns (negative end, positive
// end), or nullopt when the interval collapses first: the root is then within
// an ulp of sing.
template <class H>
std::optional<std::pair<double, double>> finite_bracket(H&& h, double neg, double sing) {
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (neg + sing);
    if (m == neg || m == sing) break;
    const double v = h(m);
    if (std::isinf(v)) {
      sing = m;
    } else if (v > 0) {
      return std::make_pair(neg, m);
    } else {
      neg = m;
    }
  }
  return std::nullopt;
}

// Bracket a sign change of monotone h in x > 0 by scaling from x0.
template <class H>
std::pair<double, double> bracket_positive(H&& h, double x0, bool decreasing) {
  const double v0 = h(x0);
  const bool up = decreasing ? v0 > 0 : v0 < 0;
  return expand_bracket(h, x0, up ? Direction::Up : Direction::Down, 2.0, 1100);
}

}  // namespace detail

/// E_t(alpha) = G(alpha) t - G(alpha t), with the complement tc = 1 - t.
inline double E_t(const Nonlinearity& n, double alpha, double t, double tc) {
  if (tc < detail::kTaylorSwitch) return n.G_drop(alpha, alpha * tc) - n.G(alpha) * tc;
  return n.G(alpha) * t - n.G(alpha * t);
}
inline double E_t(const Nonlinearity& n, double alpha, double t) { return E_t(n, alpha, t, 1 - t); }

/// Phi(alpha, lambda) = int_0^1 alpha (lambda E + 1) / sqrt(lambda E (lambda E + 2)) dt.
inline double phi(const ProblemSpec& s, double alpha, double lambda) {
  if (!(alpha > 0) || !(alpha < s.c_star())) detail::out_of_range("phi needs 0 < alpha < c*", alpha);
  if (!(lambda > 0)) detail::out_of_range("phi needs lambda > 0", lambda);
  const auto& n = s.n();
  return integrate01([&](double t, double tc) { return alpha * detail::kernel(lambda * E_t(n, alpha, t, tc)); },
                     s.tol())
      .value;
}

/// The lambda with Phi(alpha, lambda) = L.
inline double lambda_hat(const ProblemSpec& s, double alpha) {
  if (!(alpha > 0) || !(alpha < s.c_star_L())) detail::out_of_range("lambda_hat needs 0 < alpha < c*_L", alpha);
  auto h = [&](double lam) { return phi(s, alpha, lam) - s.L(); };
  const auto [a, b] = detail::bracket_positive(h, 1.0, true);
  return find_root(h, a, b, s.tol());
}

inline double mu_hat(const ProblemSpec& s, double alpha) {
  return lambda_hat(s, alpha) * s.n().G(alpha) / alpha;
}

namespace detail {

// alpha in (0, c*_L) where an increasing function of alpha (ranging over
// (lo_value, inf)) equals target.
template <class H>
double invert_increasing(const ProblemSpec& s, H&& h, double target) {
  const double top = s.c_star_L();
  auto r = [&](double a) { return h(a) - target; };
  double a = 0.5 * top, b = 0.5 * top;
  if (r(a) > 0) {
    for (int k = 1;; ++k) {
      const double x = 0.5 * top * std::ldexp(1.0, -k);
      if (r(x) <= 0) {
        a = x;
        break;
      }
      b = x;
      if (k > 1000) throw Error(ErrorKind::NoBracket, "inverse stays above the target as alpha -> 0");
    }
  } else {
    const auto br = approach(r, a, top, true, 52);
    if (!br) throw Error(ErrorKind::NoBracket, "inverse stays below the target as alpha -> c*_L");
    a = br->first;
    b = br->second;
  }
  return find_root(r, a, b, s.tol());
}

inline double min_T(const ProblemSpec& s, ParamPoint pt, double* alpha_out = nullptr) {
  TimeMap tm(s, pt);
  const double a = tm.alpha_tilde(false);
  if (alpha_out) *alpha_out = a;
  return tm.T(a);
}

}  // namespace detail

/// lambda_bar(mu) with the starting amplitude theta = mu_hat^-1(mu).
inline Threshold lambda_bar_point(const ProblemSpec& s, double mu) {
  if (!(mu > 0)) detail::out_of_range("lambda_bar needs mu > 0", mu);
  const double a = detail::invert_increasing(s, [&](double x) { return mu_hat(s, x); }, mu);
  return {lambda_hat(s, a), a};
}
inline double lambda_bar(const ProblemSpec& s, double mu) { return lambda_bar_point(s, mu).value; }

/// lambda_star(mu) with the fold amplitude alpha_tilde.
inline Threshold lambda_star_point(const ProblemSpec& s, double mu) {
  if (!(mu > 0)) detail::out_of_range("lambda_star needs mu > 0", mu);
  const double lm = lambda_mu(s, mu);
  // Search in d = lambda / lambda_mu - 1; min T decreases from inf to 0.
  auto h = [&](double d) { return detail::min_T(s, {mu, lm * (1 + d)}) - s.L(); };
  const auto [a, b] = detail::bracket_positive(h, 0.01, true);
  const double d = find_root(h, a, b, s.tol());
  Threshold out{lm * (1 + d), 0};
  detail::min_T(s, {mu, out.value}, &out.alpha);
  return out;
}
inline double lambda_star(const ProblemSpec& s, double mu) { return lambda_star_point(s, mu).value; }

/// mu_star(lambda) with the fold amplitude.
inline Threshold mu_star_point(const ProblemSpec& s, double lambda) {
  if (!(lambda > 0)) detail::out_of_range("mu_star needs lambda > 0", lambda);
  if (!(s.L() > s.eta(lambda))) throw Error(ErrorKind::RegimeNotApplicable, "L <= eta(lambda): mu_star does not exist");
  const double top = mu_lambda(s, lambda);
  auto h = [&](double mu) { return detail::min_T(s, {mu, lambda}) - s.L(); };
  double a = 0.5 * top, b = 0.5 * top;
  if (h(a) < 0) {
    const auto br = detail::approach(h, a, top, true, 52);
    if (!br) throw Error(ErrorKind::NoBracket, "min T stays below L as mu -> mu_lambda");
    a = br->first;
    b = br->second;
  } else {
    for (int k = 1;; ++k) {
      const double x = 0.5 * top * std::ldexp(1.0, -k);
      if (h(x) < 0) {
        a = x;
        break;
      }
      b = x;
      if (k > 1000) throw Error(ErrorKind::NoBracket, "min T stays above L as mu -> 0");
    }
  }
  Threshold out{find_root(h, a, b, s.tol()), 0};
  detail::min_T(s, {out.value, lambda}, &out.alpha);
  return out;
}
inline double mu_star(const ProblemSpec& s, double lambda) { return mu_star_point(s, lambda).value; }

/// mu_bar(lambda) = mu_hat(lambda_hat^-1(lambda)) with that amplitude.
inline Threshold mu_bar_point(const ProblemSpec& s, double lambda) {
  if (!(lambda > 0)) detail::out_of_range("mu_bar needs lambda > 0", lambda);
  if (!(s.L() > 2 * s.eta(lambda)))
    throw Error(ErrorKind::RegimeNotApplicable, "L <= 2 eta(lambda): mu_bar does not exist");
  const double a = detail::invert_increasing(s, [&](double x) { return lambda_hat(s, x); }, lambda);
  return {lambda * s.n().G(a) / a, a};
}
inline double mu_bar(const ProblemSpec& s, double lambda) { return mu_bar_point(s, lambda).value; }

namespace detail {

// T at a fixed amplitude as a function of (mu, lambda); +inf when alpha has
// reached beta.
inline double T_fixed_alpha(const ProblemSpec& s, ParamPoint pt, double alpha) {
  TimeMap tm(s, pt);
  if (alpha >= tm.roots().beta || !(f_eval(s, pt, alpha) > 0)) return std::numeric_limits<double>::infinity();
  return tm.T(alpha);
}

inline bool at_target(double T, double L) { return std::abs(T - L) <= 1e-9 * L; }

}  // namespace detail

/// The lambda with T_{mu,lambda}(alpha) = L (T decreases in lambda).
inline double lambda_L(const ProblemSpec& s, double mu, double alpha) {
  if (!(mu > 0)) detail::out_of_range("lambda_L needs mu > 0", mu);
  if (!(alpha > 0) || !(alpha < s.sigma())) detail::out_of_range("lambda_L needs 0 < alpha < sigma", alpha);
  const auto& n = s.n();
  const double L = s.L();
  auto h = [&](double lam) { return detail::T_fixed_alpha(s, {mu, lam}, alpha) - L; };
  double lo;
  if (alpha < s.c_star()) {
    // Smallest admissible lambda puts alpha at theta, where T is finite.
    lo = mu * alpha / n.G(alpha);
    const double v = h(lo);
    if (detail::at_target(v + L, L)) return lo;
    if (v < 0) {
      std::ostringstream os;
      os << "no lambda with T(alpha) = L at alpha = " << alpha << ": T(theta) < L";
      throw Error(ErrorKind::NoBracket, os.str());
    }
  } else {
    lo = mu / n.g(alpha);
  }
  // T = +inf at alpha = beta, i.e. lambda = mu / g(alpha) above c*.
  double a = lo;
  if (!(h(a) > 0)) throw Error(ErrorKind::NoBracket, "T(alpha) does not exceed L at the smallest admissible lambda");
  double b = lo;
  for (int k = 0;; ++k) {
    b = lo * std::ldexp(1.0, k + 1);
    if (h(b) < 0) break;
    a = b;
    if (k > 1000) throw Error(ErrorKind::NoBracket, "T(alpha) stays above L as lambda grows");
  }
  if (std::isinf(h(a))) {
    const auto br = detail::finite_bracket(h, b, a);
    if (!br) return a;
    std::tie(b, a) = *br;
  }
  return find_root(h, a, b, s.tol());
}

/// The mu with T_{mu,lambda}(alpha) = L (T increases in mu).
inline double mu_L(const ProblemSpec& s, double lambda, double alpha) {
  if (!(lambda > 0)) detail::out_of_range("mu_L needs lambda > 0", lambda);
  if (!(alpha > 0) || !(alpha < s.sigma())) detail::out_of_range("mu_L needs 0 < alpha < sigma", alpha);
  const auto& n = s.n();
  const double L = s.L();
  auto h = [&](double mu) { return detail::T_fixed_alpha(s, {mu, lambda}, alpha) - L; };
  double hi;
  if (alpha < s.c_star()) {
    hi = lambda * n.G(alpha) / alpha;
    const double v = h(hi);
    if (detail::at_target(v + L, L)) return hi;
    if (v < 0) {
      std::ostringstream os;
      os << "no mu with T(alpha) = L at alpha = " << alpha << ": T(theta) < L";
      throw Error(ErrorKind::NoBracket, os.str());
    }
  } else {
    hi = lambda * n.g(alpha);
  }
  double b = hi;
  if (std::isinf(h(hi))) {
    // Step down from the singular end until T is finite.
    double lo = 0.5 * hi;
    while (std::isinf(h(lo))) lo *= 0.5;
    if (h(lo) > 0) {
      b = lo;
    } else {
      const auto br = detail::finite_bracket(h, lo, hi);
      if (!br) return hi;
      b = br->second;
    }
  }
  double a = b;
  for (int k = 1;; ++k) {
    a = b * std::ldexp(1.0, -k);
    if (!(a > 0)) throw Error(ErrorKind::NoBracket, "T(alpha) stays above L as mu -> 0");
    if (h(a) < 0) break;
  }
  return find_root(h, a, b, s.tol());
}

/// The lambda with T_{0,lambda}(alpha) = L.
inline double lambda_L_zero(const ProblemSpec& s, double alpha) {
  auto h = [&](double lam) { return time_map_zero(s, lam, alpha) - s.L(); };
  const auto [a, b] = detail::bracket_positive(h, 1.0, true);
  return find_root(h, a, b, s.tol());
}

namespace detail {

inline constexpr double kGridMargin = 1e-6;

template <class Solve>
std::vector<CurvePoint> trace_points(const std::vector<double>& alphas, Solve&& solve) {
  std::vector<CurvePoint> pts(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) {
    pts[i].alpha = alphas[i];
    try {
      pts[i].param = solve(alphas[i]);
    } catch (const Error&) {
      pts[i].param = std::numeric_limits<double>::quiet_NaN();
      pts[i].flags |= flag::clamped;
    }
  });
  return pts;
}

// Marks the discrete extremum of param (min or max) and refines it with a
// parabola through the neighbours.
inline void mark_turning(Curve& c, bool minimum) {
  auto& pts = c.points;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].has(flag::clamped)) continue;
    if (!best || (minimum ? pts[i].param < pts[*best].param : pts[i].param > pts[*best].param)) best = i;
  }
  if (!best) return;
  const std::size_t i = *best;
  pts[i].flags |= flag::turning;
  c.turning_index = i;
  // An extremum on the first or last point: the fold is closer to the end
  // than the grid resolves.
  if (i == 0 || i + 1 == pts.size()) {
    c.turning_refined = pts[i];
    return;
  }
  const double x0 = pts[i - 1].alpha, x1 = pts[i].alpha, x2 = pts[i + 1].alpha;
  const double y0 = pts[i - 1].param, y1 = pts[i].param, y2 = pts[i + 1].param;
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  CurvePoint r = pts[i];
  if (curv != 0) {
    const double xv = 0.5 * (x0 + x1) - d01 / (2 * curv);
    r.alpha = xv;
    r.param = y1 + d01 * (xv - x1) + curv * (xv - x0) * (xv - x1);
  }
  c.turning_refined = r;
}

}  // namespace detail

/// S_mu: lambda against amplitude for fixed mu > 0.
inline Curve trace_S(const ProblemSpec& s, double mu, int n_points) {
  if (!(mu > 0)) detail::out_of_range("trace_S needs mu > 0", mu);
  if (n_points < 3) detail::out_of_range("trace_S needs n_points >= 3", n_points);
  const auto start = lambda_bar_point(s, mu);
  const double end = s.m_sigma_L() * (1 - detail::kGridMargin);
  auto alphas = detail::cheb_grid(start.alpha, end, n_points);
  Curve c;
  c.kind = CurveKind::S_mu;
  c.fixed_param = mu;
  c.points = detail::trace_points(alphas, [&](double a) { return lambda_L(s, mu, a); });
  c.points.front().flags |= flag::start;
  detail::mark_turning(c, true);
  return c;
}

/// The mu = 0 curve: lambda against amplitude on (0, m_sigma_L).
inline Curve trace_S_zero(const ProblemSpec& s, int n_points) {
  if (n_points < 3) detail::out_of_range("trace_S_zero needs n_points >= 3", n_points);
  const double m = s.m_sigma_L();
  auto alphas = detail::cheb_grid(1e-4 * m, m * (1 - detail::kGridMargin), n_points);
  Curve c;
  c.kind = CurveKind::S_zero;
  c.points = detail::trace_points(alphas, [&](double a) { return lambda_L_zero(s, a); });
  return c;
}

/// Sigma_lambda: mu against amplitude for fixed lambda. Starts at
/// (mu_bar, theta) when L > 2 eta, otherwise at amplitude 0.
inline Curve trace_Sigma(const ProblemSpec& s, double lambda, int n_points) {
  if (!(lambda > 0)) detail::out_of_range("trace_Sigma needs lambda > 0", lambda);
  if (n_points < 3) detail::out_of_range("trace_Sigma needs n_points >= 3", n_points);
  if (!(s.L() > s.eta(lambda))) {
    std::ostringstream os;
    os << "L = " << s.L() << " <= eta = " << s.eta(lambda) << ": the curve does not exist at lambda = " << lambda;
    throw Error(ErrorKind::RegimeNotApplicable, os.str());
  }
  const double gamma = gamma_lambda(s, lambda);
  const bool has_start = s.L() > 2 * s.eta(lambda);
  const double a0 = has_start ? mu_bar_point(s, lambda).alpha : 1e-4 * gamma;
  auto alphas = detail::cheb_grid(a0, gamma * (1 - detail::kGridMargin), n_points);
  Curve c;
  c.kind = CurveKind::Sigma_lambda;
  c.fixed_param = lambda;
  c.points = detail::trace_points(alphas, [&](double a) { return mu_L(s, lambda, a); });
  if (has_start) c.points.front().flags |= flag::start;
  detail::mark_turning(c, false);
  return c;
}

struct BifurcationSet {
  Curve B1, B2, C1, C2;
};

/// B1 = {(mu, lambda_bar)}, B2 = {(mu, lambda_star)}; C1/C2 carry the
/// starting and fold amplitudes.
inline BifurcationSet bifurcation_set(const ProblemSpec& s, const std::vector<double>& mu_grid) {
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 0) || (i > 0 && !(mu_grid[i] > mu_grid[i - 1])))
      throw Error(ErrorKind::OutOfRange, "mu grid must be positive and strictly increasing");
  }
  std::vector<Threshold> bar(mu_grid.size()), star(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    bar[i] = lambda_bar_point(s, mu_grid[i]);
    star[i] = lambda_star_point(s, mu_grid[i]);
  });
  BifurcationSet out;
  out.B1.kind = CurveKind::B1;
  out.B2.kind = CurveKind::B2;
  out.C1.kind = CurveKind::C1;
  out.C2.kind = CurveKind::C2;
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    const double mu = mu_grid[i];
    out.B1.points.push_back({bar[i].value, bar[i].alpha, mu, 0});
    out.C1.points.push_back({bar[i].value, bar[i].alpha, mu, 0});
    out.B2.points.push_back({star[i].value, star[i].alpha, mu, 0});
    out.C2.points.push_back({star[i].value, star[i].alpha, mu, 0});
  }
  return out;
}

namespace detail {

inline constexpr int kCountGrid = 512;

// Amplitudes alpha in [lo, hi) with T(alpha) = L, for T with a single
// interior minimum and T -> +inf at hi. grid holds T - L on the abscissas.
template <class Tm, class DTm>
std::vector<double> roots_on_grid(Tm&& T, DTm&& dT, const std::vector<double>& xs, double hi, double L,
                                  const Tolerances& tol) {
  const double band = 1e-8 * L;
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = T(xs[i]) - L;
  auto sgn = [&](double x) { return std::abs(x) <= band ? 0 : (x > 0 ? 1 : -1); };
  auto h = [&](double a) { return T(a) - L; };

  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sgn(v[i]) == 0) {
      // One root per run of in-band values; keep the one closest to L.
      std::size_t j = i;
      while (j + 1 < xs.size() && sgn(v[j + 1]) == 0) ++j;
      std::size_t best = i;
      for (std::size_t k = i; k <= j; ++k)
        if (std::abs(v[k]) < std::abs(v[best])) best = k;
      out.push_back(xs[best]);
      i = j;
      continue;
    }
    if (i + 1 < xs.size() && sgn(v[i + 1]) != 0 && sgn(v[i]) != sgn(v[i + 1]))
      out.push_back(find_root(h, xs[i], xs[i + 1], tol));
  }
  // The virtual value +inf at hi.
  if (sgn(v.back()) < 0) {
    const auto br = approach(h, xs.back(), hi, true, 60);
    out.push_back(br ? find_root(h, br->first, br->second, tol) : xs.back());
  }
  // A pair of roots hidden between grid points around the minimum.
  if (out.empty()) {
    const auto m = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    if (m > 0 && m + 1 < xs.size()) {
      const double x0 = xs[m - 1], span = xs[m + 1] - x0;
      const auto r = minimize([&](double x) { return T(x0 + span * x); }, 0.0, 1.0, tol);
      const double xm = x0 + span * r.x, vm = r.fx - L;
      if (std::abs(vm) <= band) {
        out.push_back(xm);
      } else if (vm < 0) {
        out.push_back(find_root(h, xs[m - 1], xm, tol));
        out.push_back(find_root(h, xm, xs[m + 1], tol));
      }
    }
  }
  // Two roots that sit on a tangency count once.
  if (out.size() == 2) {
    const double w = hi - xs.front();
    auto flat = [&](double a) { return std::abs(dT(a)) <= 1e-6 * (T(a)) / w; };
    if (flat(out[0]) && flat(out[1])) out = {0.5 * (out[0] + out[1])};
  }
  return out;
}

}  // namespace detail

/// Amplitudes of all positive solutions at pt, ascending.
inline std::vector<double> solution_amplitudes(const ProblemSpec& s, ParamPoint pt) {
  if (!(pt.lambda > 0)) detail::out_of_range("count_solutions needs lambda > 0", pt.lambda);
  if (!(pt.mu >= 0)) detail::out_of_range("count_solutions needs mu >= 0", pt.mu);
  const double L = s.L();
  if (pt.mu == 0) {
    const double sig = s.sigma();
    const auto xs = detail::cheb_grid(1e-9 * sig, sig * (1 - 1e-9), detail::kCountGrid);
    auto T = [&](double a) { return time_map_zero(s, pt.lambda, a); };
    auto dT = [&](double a) {
      const double h = s.tol().fd_step_rel * a;
      return (T(a + h) - T(a - h)) / (2 * h);
    };
    return detail::roots_on_grid(T, dT, xs, sig, L, s.tol());
  }
  if (!in_omega(s, pt)) return {};
  TimeMap tm(s, pt);
  const auto& r = tm.roots();
  const double w = r.beta - r.theta;
  const auto xs = detail::cheb_grid(r.theta, r.theta + w * (1 - 1e-9), detail::kCountGrid);
  return detail::roots_on_grid([&](double a) { return tm.T(a); }, [&](double a) { return tm.dT_dalpha(a); }, xs,
                               r.beta, L, s.tol());
}

inline int count_solutions(const ProblemSpec& s, ParamPoint pt) {
  return static_cast<int>(solution_amplitudes(s, pt).size());
}

/// Region of pt from the thresholds lambda_star(mu) and lambda_bar(mu).
inline Region classify(const ProblemSpec& s, ParamPoint pt) {
  if (!(pt.mu > 0)) detail::out_of_range("classify needs mu > 0", pt.mu);
  constexpr double tol_b = 1e-9;
  Region r;
  r.lambda_star = lambda_star(s, pt.mu);
  r.lambda_bar = lambda_bar(s, pt.mu);
  const double lam = pt.lambda;
  if (std::abs(lam - r.lambda_star) <= tol_b * r.lambda_star) {
    r.label = RegionLabel::OnB2;
  } else if (std::abs(lam - r.lambda_bar) <= tol_b * r.lambda_bar) {
    r.label = RegionLabel::OnB1;
  } else if (lam < r.lambda_star) {
    r.label = RegionLabel::M0;
  } else if (lam < r.lambda_bar) {
    r.label = RegionLabel::M2;
  } else {
    r.label = RegionLabel::M1;
  }
  switch (r.label) {
    case RegionLabel::M0: r.multiplicity = 0; break;
    case RegionLabel::M1:
    case RegionLabel::OnB2: r.multiplicity = 1; break;
    case RegionLabel::M2:
    case RegionLabel::OnB1: r.multiplicity = 2; break;
  }
  return r;
}

}  // namespace bif
