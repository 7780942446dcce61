#pragma once

// Subcommands behind the bif executable. Each returns its table (or record)
// and writes its files into config.output_dir.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bif/curves.hpp"
#include "bif/error.hpp"
#include "bif/io.hpp"
#include "bif/shooting.hpp"

namespace bif {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRegime = 3, kExitInconsistent = 4, kExitNumerical = 5 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidNonlinearity:
    case ErrorKind::OutOfRange:
    case ErrorKind::NotInOmega: return kExitConfig;
    case ErrorKind::RegimeNotApplicable:
    case ErrorKind::NoGamma: return kExitRegime;
    case ErrorKind::InternalInconsistency: return kExitInconsistent;
    default: return kExitNumerical;
  }
}

namespace detail {

inline std::vector<std::string> config_comments(const RunConfig& c, const std::string& what) {
  auto j = to_json(c);
  j.erase("output_dir");
  return {"bif " + what, "config " + j.dump()};
}

inline std::filesystem::path out_path(const RunConfig& c, const char* name) {
  return std::filesystem::path(c.output_dir) / name;
}

inline Plot curve_plot(const Curve& c, const std::string& title, const std::string& xlabel) {
  Plot p;
  p.title = title;
  p.xlabel = xlabel;
  p.ylabel = "max u";
  Series s;
  s.name = to_string(c.kind);
  for (const auto& pt : c.points) {
    s.xs.push_back(pt.param);
    s.ys.push_back(pt.alpha);
  }
  p.series.push_back(std::move(s));
  if (c.turning_index) {
    const auto& t = c.points[*c.turning_index];
    p.markers.push_back({t.param, t.alpha, "turning point"});
  }
  return p;
}

inline CsvTable curve_table(const Curve& c, const char* param_name, const RunConfig& cfg, const std::string& what) {
  CsvTable t;
  t.comments = config_comments(cfg, what);
  t.comments.push_back("flag bits: 1 start, 2 turning, 4 clamped");
  t.header = {"alpha", param_name, "flag"};
  for (const auto& p : c.points) t.add_row({p.alpha, p.param, static_cast<double>(p.flags)});
  return t;
}

inline std::string num(double v) { return fmt17(v); }

}  // namespace detail

/// One row of characteristic constants.
inline CsvTable cmd_chars(const RunConfig& cfg) {
  const auto s = cfg.spec();
  CsvTable t;
  t.comments = detail::config_comments(cfg, "chars");
  t.header = {"sigma", "u0", "c_star", "c_star_L", "kappa", "m_sigma_L"};
  t.add_row({s.sigma(), s.u0(), s.c_star(), s.c_star_L(), s.kappa(), s.m_sigma_L()});
  return t;
}

/// S_mu (or the mu = 0 curve) into s_mu.csv / s_mu.svg.
inline CsvTable cmd_curve_s(const RunConfig& cfg, double mu, int n) {
  if (!(mu >= 0)) throw Error(ErrorKind::OutOfRange, "curve-s needs mu >= 0");
  const auto s = cfg.spec();
  const Curve c = mu == 0 ? trace_S_zero(s, n) : trace_S(s, mu, n);
  const std::string what = "curve-s mu=" + detail::num(mu) + " n=" + std::to_string(n);
  auto t = detail::curve_table(c, "lambda", cfg, what);
  write_file_atomic(detail::out_path(cfg, "s_mu.csv"), t.str());
  write_file_atomic(detail::out_path(cfg, "s_mu.svg"),
                    render_svg(detail::curve_plot(c, "S_mu, mu = " + detail::tick(mu), "lambda")));
  return t;
}

/// Sigma_lambda into sigma_lambda.csv / sigma_lambda.svg.
inline CsvTable cmd_curve_sigma(const RunConfig& cfg, double lambda, int n) {
  const auto s = cfg.spec();
  if (!(lambda > 0)) throw Error(ErrorKind::OutOfRange, "curve-sigma needs lambda > 0");
  if (!(s.L() > s.eta(lambda))) {
    throw Error(ErrorKind::RegimeNotApplicable,
                "curve does not exist: L = " + detail::num(s.L()) + " <= eta(lambda) = " + detail::num(s.eta(lambda)));
  }
  const Curve c = trace_Sigma(s, lambda, n);
  const std::string what = "curve-sigma lambda=" + detail::num(lambda) + " n=" + std::to_string(n);
  auto t = detail::curve_table(c, "mu", cfg, what);
  write_file_atomic(detail::out_path(cfg, "sigma_lambda.csv"), t.str());
  write_file_atomic(detail::out_path(cfg, "sigma_lambda.svg"),
                    render_svg(detail::curve_plot(c, "Sigma_lambda, lambda = " + detail::tick(lambda), "mu")));
  return t;
}

/// Geometric mu grid from mu_min to mu_max.
inline std::vector<double> mu_grid(double mu_min, double mu_max, int n) {
  if (!(mu_min > 0) || !(mu_max > mu_min) || n < 2)
    throw Error(ErrorKind::OutOfRange, "bifset needs 0 < mu_min < mu_max and n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = mu_min * std::pow(mu_max / mu_min, static_cast<double>(i) / (n - 1));
  g.front() = mu_min;
  g.back() = mu_max;
  return g;
}

/// Bifurcation set into bifset.csv / bifset.svg (lambda horizontal).
inline CsvTable cmd_bifset(const RunConfig& cfg, double mu_min, double mu_max, int n) {
  const auto s = cfg.spec();
  const auto grid = mu_grid(mu_min, mu_max, n);
  const auto bs = bifurcation_set(s, grid);
  CsvTable t;
  t.comments = detail::config_comments(cfg, "bifset mu_min=" + detail::num(mu_min) + " mu_max=" + detail::num(mu_max) +
                                                 " n=" + std::to_string(n));
  t.header = {"mu", "lambda_bar", "lambda_star", "alpha_C1", "alpha_C2"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.add_row({grid[i], bs.B1.points[i].param, bs.B2.points[i].param, bs.C1.points[i].alpha, bs.C2.points[i].alpha});

  Plot p;
  p.title = "Bifurcation set";
  p.xlabel = "lambda";
  p.ylabel = "mu";
  Series b1{"B1", {}, {}, "#d62728"}, b2{"B2", {}, {}, "#1f77b4"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    b1.xs.push_back(bs.B1.points[i].param);
    b1.ys.push_back(grid[i]);
    b2.xs.push_back(bs.B2.points[i].param);
    b2.ys.push_back(grid[i]);
  }
  const double lo = b2.xs.front(), hi = b1.xs.back(), span = hi - lo;
  std::vector<std::pair<double, double>> m0, m1, m2;
  m0.push_back({lo - 0.25 * span, grid.front()});
  for (std::size_t i = 0; i < grid.size(); ++i) m0.push_back({b2.xs[i], grid[i]});
  m0.push_back({lo - 0.25 * span, grid.back()});
  for (std::size_t i = 0; i < grid.size(); ++i) m2.push_back({b2.xs[i], grid[i]});
  for (std::size_t i = grid.size(); i-- > 0;) m2.push_back({b1.xs[i], grid[i]});
  for (std::size_t i = 0; i < grid.size(); ++i) m1.push_back({b1.xs[i], grid[i]});
  m1.push_back({hi + 0.25 * span, grid.back()});
  m1.push_back({hi + 0.25 * span, grid.front()});
  for (auto [poly, name] : {std::pair{&m0, "M0"}, std::pair{&m2, "M2"}, std::pair{&m1, "M1"}}) {
    const auto [cx, cy] = polygon_centroid(*poly);
    p.labels.push_back({cx, cy, name});
  }
  p.series.push_back(std::move(b1));
  p.series.push_back(std::move(b2));
  write_file_atomic(detail::out_path(cfg, "bifset.csv"), t.str());
  write_file_atomic(detail::out_path(cfg, "bifset.svg"), render_svg(p));
  return t;
}

struct ClassifyRecord {
  nlohmann::json json;
  bool consistent = true;
};

/// Region by thresholds plus the independent root count.
inline ClassifyRecord cmd_classify(const RunConfig& cfg, double mu, double lambda) {
  const auto s = cfg.spec();
  const Region r = classify(s, {mu, lambda});
  const int count = count_solutions(s, {mu, lambda});
  ClassifyRecord out;
  out.json = {{"region", to_string(r.label)},
              {"multiplicity", r.multiplicity},
              {"lambda_star", r.lambda_star},
              {"lambda_bar", r.lambda_bar},
              {"count_check", count}};
  out.consistent = count == r.multiplicity;
  return out;
}

/// One shooting profile per solution into profiles.csv.
inline CsvTable cmd_solve(const RunConfig& cfg, double mu, double lambda, int n) {
  const auto s = cfg.spec();
  const auto amps = solution_amplitudes(s, {mu, lambda});
  CsvTable t;
  t.comments = detail::config_comments(cfg, "solve mu=" + detail::num(mu) + " lambda=" + detail::num(lambda));
  t.comments.push_back("solutions " + std::to_string(amps.size()));
  t.header = {"solution", "alpha", "x", "u"};
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const auto prof = solve_profile(s, {mu, lambda}, amps[k], n);
    for (std::size_t i = 0; i < prof.xs.size(); ++i)
      t.add_row({static_cast<double>(k), amps[k], prof.xs[i], prof.us[i]});
  }
  write_file_atomic(detail::out_path(cfg, "profiles.csv"), t.str());
  return t;
}

}  // namespace bif
