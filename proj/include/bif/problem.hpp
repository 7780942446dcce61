#pragma once

#include <cmath>
#include <memory>
#include <sstream>

#include "bif/error.hpp"
#include "bif/nonlinearity.hpp"
#include "bif/numerics.hpp"

namespace bif {

/// The fixed context of every computation: g, the half-length L and solver
/// tolerances. The characteristic constants of g are computed once here.
class ProblemSpec {
 public:
  ProblemSpec(std::shared_ptr<const Nonlinearity> n, double L, Tolerances tol = {})
      : n_(std::move(n)), L_(L), tol_(tol) {
    if (!n_) throw Error(ErrorKind::InvalidConfig, "null nonlinearity");
    if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidConfig, "L must be positive");
    tol_.validate();
    validate(*n_);
    Tolerances tight = tol_;
    tight.root_rel = std::min(tol_.root_rel, 1e-14);
    u0_ = chars::u0(*n_, tight);
    c_star_ = chars::c_star(*n_, tight);
    g_u0_ = n_->g(u0_);
    g_c_star_ = n_->g(c_star_);
  }

  const Nonlinearity& n() const { return *n_; }
  std::shared_ptr<const Nonlinearity> n_ptr() const { return n_; }
  double L() const { return L_; }
  const Tolerances& tol() const { return tol_; }

  double sigma() const { return n_->sigma(); }
  double u0() const { return u0_; }
  double c_star() const { return c_star_; }
  double c_star_L() const { return std::min(c_star_, L_); }
  double g_u0() const { return g_u0_; }
  double g_c_star() const { return g_c_star_; }
  double kappa() const { return chars::kappa(*n_, L_); }
  double eta(double lambda) const { return chars::eta(*n_, lambda); }
  double m_sigma_L() const { return chars::m_sigma_L(*n_, L_); }
  bool infinite_slope() const { return !n_->gprime0().is_finite(); }

  ProblemSpec with_L(double L) const {
    if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidConfig, "L must be positive");
    ProblemSpec s = *this;
    s.L_ = L;
    return s;
  }
  ProblemSpec with_tol(const Tolerances& tol) const {
    tol.validate();
    ProblemSpec s = *this;
    s.tol_ = tol;
    return s;
  }

 private:
  std::shared_ptr<const Nonlinearity> n_;
  double L_;
  Tolerances tol_;
  double u0_ = 0, c_star_ = 0, g_u0_ = 0, g_c_star_ = 0;
};

/// (mu, lambda): harvest rate and growth rate.
struct ParamPoint {
  double mu = 0;
  double lambda = 0;
};

/// The zero of f below u0, the zero of F, and the zero of f above u0.
struct RootStructure {
  double varsigma = 0;
  double theta = 0;
  double beta = 0;
};

inline double lambda_min(const ProblemSpec& s, double mu) { return mu / s.g_u0(); }
inline double lambda_mu(const ProblemSpec& s, double mu) { return mu / s.g_c_star(); }
inline double mu_lambda(const ProblemSpec& s, double lambda) { return s.g_c_star() * lambda; }

inline bool in_omega(const ProblemSpec& s, ParamPoint pt) {
  return pt.mu > 0 && pt.lambda > lambda_mu(s, pt.mu);
}

inline double f_eval(const ProblemSpec& s, ParamPoint pt, double u) { return pt.lambda * s.n().g(u) - pt.mu; }
inline double F_eval(const ProblemSpec& s, ParamPoint pt, double u) { return pt.lambda * s.n().G(u) - pt.mu * u; }
inline double B_eval(const ProblemSpec& s, ParamPoint pt, double alpha, double u) {
  return F_eval(s, pt, alpha) - F_eval(s, pt, u);
}

inline RootStructure roots(const ProblemSpec& s, ParamPoint pt) {
  if (!(pt.lambda > 0) || !(pt.mu > 0) || !(pt.lambda > lambda_min(s, pt.mu))) {
    std::ostringstream os;
    os << "(mu, lambda) = (" << pt.mu << ", " << pt.lambda << ") admits no positive zero of lambda g - mu";
    throw Error(ErrorKind::NotInOmega, os.str());
  }
  const auto& n = s.n();
  const auto& tol = s.tol();
  auto f = [&](double u) { return pt.lambda * n.g(u) - pt.mu; };
  auto F = [&](double u) { return pt.lambda * n.G(u) - pt.mu * u; };

  RootStructure r;
  const double left = s.infinite_slope() ? 1e-300 : 0.0;
  r.varsigma = find_root(f, left, s.u0(), tol);
  r.beta = find_root(f, s.u0(), s.sigma(), tol);
  if (!(F(r.beta) > 0)) {
    std::ostringstream os;
    os << "lambda = " << pt.lambda << " <= lambda_mu = " << lambda_mu(s, pt.mu) << ": F has no zero in (varsigma, beta)";
    throw Error(pt.lambda == lambda_mu(s, pt.mu) ? ErrorKind::NotInOmega : ErrorKind::NoTheta, os.str());
  }
  r.theta = find_root(F, r.varsigma, r.beta, tol);
  return r;
}

}  // namespace bif
