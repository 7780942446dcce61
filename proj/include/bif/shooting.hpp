#pragma once

// Shooting oracle. Integrates -(u'/sqrt(1-u'^2))' = lambda g(u) - mu as the
// planar system u' = w/sqrt(1+w^2), w' = mu - lambda g(u) from the symmetric
// midpoint (u, w) = (alpha, 0) and reports where u first reaches 0. Shares no
// code with the quadrature path.

#include <algorithm>
#include <array>
#include <iterator>
#include <cmath>
#include <sstream>
#include <vector>

#include "bif/error.hpp"
#include "bif/problem.hpp"

namespace bif {

struct Profile {
  std::vector<double> xs;
  std::vector<double> us;
  std::vector<double> slopes;  // u'(x)
  double x_end = 0;
};

namespace detail {

using State = std::array<double, 2>;  // (u, w)

class ShootingRun {
 public:
  ShootingRun(const ProblemSpec& s, ParamPoint pt, double alpha) : n_(s.n()), pt_(pt), alpha_(alpha), x_max_(100 * s.L()) {}

  State rhs(const State& y) const {
    const double u = std::max(y[0], 0.0);
    return {y[1] / std::sqrt(1 + y[1] * y[1]), pt_.mu - pt_.lambda * n_.g(u)};
  }

  double slope(const State& y) const { return y[1] / std::sqrt(1 + y[1] * y[1]); }

  State step(const State& y, double h) const {
    const State k1 = rhs(y);
    const State k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  }

  struct StepRecord {
    double x;
    State y;
  };

  // Runs at fixed step h. Returns the event abscissa; when record is set the
  // accepted states are kept for dense output. The event inside the last step
  // is located by bisection on partial RK4 steps, which serve as the dense
  // interpolant.
  double run(double h, std::vector<StepRecord>* record) const {
    State y{alpha_, 0.0};
    double x = 0;
    if (record) record->push_back({x, y});
    bool descending = false;
    const double graze = 1e-6 * alpha_;
    while (x < x_max_) {
      const State yn = step(y, h);
      if (!std::isfinite(yn[0]) || !std::isfinite(yn[1])) throw Error(ErrorKind::NonFinite, "shooting state is not finite");
      if (yn[0] <= 0) {
        double lo = 0, hi = 1;
        for (int i = 0; i < 60; ++i) {
          const double mid = 0.5 * (lo + hi);
          (step(y, mid * h)[0] > 0 ? lo : hi) = mid;
        }
        return x + 0.5 * (lo + hi) * h;
      }
      if (yn[1] < 0) descending = true;
      if (descending && yn[1] >= 0) {
        // u turned around inside this step; a contact with 0 up to 1e-6 alpha
        // is the grazing end of a solution with amplitude theta.
        double lo = 0, hi = 1;
        for (int i = 0; i < 60; ++i) {
          const double mid = 0.5 * (lo + hi);
          (step(y, mid * h)[1] < 0 ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        const double umin = step(y, s * h)[0];
        if (umin <= graze) return x + s * h;
        std::ostringstream os;
        os.precision(17);
        os << "u turns back at " << umin << " > 0 before reaching 0 (alpha = " << alpha_ << ")";
        throw Error(ErrorKind::EventNotReached, os.str());
      }
      y = yn;
      x += h;
      if (record) record->push_back({x, y});
    }
    std::ostringstream os;
    os << "u did not reach 0 within x = " << x_max_ << " (alpha = " << alpha_ << ")";
    throw Error(ErrorKind::EventNotReached, os.str());
  }

  // State at x by a partial step from the last recorded state at or before x,
  // split into substeps: with g'(0+) infinite the right-hand side is only
  // Hoelder continuous at u = 0 and one RK4 step loses order there.
  State dense(const std::vector<StepRecord>& rec, double x) const {
    auto it = std::upper_bound(rec.begin(), rec.end(), x, [](double v, const StepRecord& r) { return v < r.x; });
    const auto& base = *(it == rec.begin() ? it : std::prev(it));
    if (!(x > base.x)) return base.y;
    constexpr int kSub = 8;
    State y = base.y;
    const double hs = (x - base.x) / kSub;
    for (int i = 0; i < kSub; ++i) y = step(y, hs);
    return y;
  }

  // Step halving until successive event abscissas agree to 1e-9 max(1, x).
  double converged_step(double* x_end) const {
    double h = std::min(0.01, alpha_ / 16);
    double prev = run(h, nullptr);
    for (int level = 1; level <= 16; ++level) {
      h *= 0.5;
      const double cur = run(h, nullptr);
      if (std::abs(cur - prev) <= 1e-9 * std::max(1.0, cur)) {
        *x_end = cur;
        return h;
      }
      prev = cur;
    }
    std::ostringstream os;
    os << "shooting step halving did not converge (alpha = " << alpha_ << ")";
    throw Error(ErrorKind::NoConvergence, os.str());
  }

  double alpha() const { return alpha_; }

 private:
  const Nonlinearity& n_;
  ParamPoint pt_;
  double alpha_;
  double x_max_;
};

inline void check_shooting_input(const ProblemSpec& s, ParamPoint pt, double alpha) {
  if (!(pt.lambda > 0) || !(pt.mu >= 0) || !(alpha > 0) || !(alpha < s.sigma())) {
    std::ostringstream os;
    os << "shooting needs lambda > 0, mu >= 0 and 0 < alpha < sigma (alpha = " << alpha << ")";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
}

}  // namespace detail

/// Half-length of the even solution with u(0) = alpha, u'(0) = 0.
inline double shoot_half_length(const ProblemSpec& s, ParamPoint pt, double alpha) {
  detail::check_shooting_input(s, pt, alpha);
  detail::ShootingRun run(s, pt, alpha);
  double x_end = 0;
  run.converged_step(&x_end);
  return x_end;
}

/// Profile on [0, x_end]: n_samples uniformly spaced abscissas starting at 0,
/// plus the event point.
inline Profile solve_profile(const ProblemSpec& s, ParamPoint pt, double alpha, int n_samples) {
  detail::check_shooting_input(s, pt, alpha);
  if (n_samples < 2) throw Error(ErrorKind::OutOfRange, "solve_profile needs at least 2 samples");
  detail::ShootingRun run(s, pt, alpha);
  double x_end = 0;
  const double h = run.converged_step(&x_end);
  std::vector<detail::ShootingRun::StepRecord> rec;
  run.run(h, &rec);

  Profile p;
  p.x_end = x_end;
  for (int j = 0; j <= n_samples; ++j) {
    const double x = j == n_samples ? x_end : x_end * j / n_samples;
    const auto y = run.dense(rec, x);
    p.xs.push_back(x);
    p.us.push_back(j == 0 ? alpha : (j == n_samples ? std::max(y[0], 0.0) : y[0]));
    p.slopes.push_back(run.slope(y));
  }
  return p;
}

}  // namespace bif
