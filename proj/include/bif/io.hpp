#pragma once

// Run configuration, CSV tables, SVG plots and atomic file writes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bif/error.hpp"
#include "bif/nonlinearity.hpp"
#include "bif/numerics.hpp"
#include "bif/problem.hpp"

namespace bif {

struct RunConfig {
  double p = 1, q = 1, K = 1;
  double L = 5;
  Tolerances tol;
  int n_points = 200;
  std::string output_dir = ".";

  void validate() const {
    (void)GeneralizedLogistic(p, q, K);
    if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidConfig, "L must be positive");
    tol.validate();
    if (n_points < 3) throw Error(ErrorKind::InvalidConfig, "n_points must be >= 3");
    if (output_dir.empty()) throw Error(ErrorKind::InvalidConfig, "output_dir must not be empty");
  }

  ProblemSpec spec() const { return ProblemSpec(std::make_shared<GeneralizedLogistic>(p, q, K), L, tol); }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"p", c.p},
          {"q", c.q},
          {"K", c.K},
          {"L", c.L},
          {"tol",
           {{"quad_rel", c.tol.quad_rel},
            {"root_rel", c.tol.root_rel},
            {"fd_step_rel", c.tol.fd_step_rel},
            {"level_cap", c.tol.level_cap}}},
          {"n_points", c.n_points},
          {"output_dir", c.output_dir}};
}

namespace detail {

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; }))
      throw Error(ErrorKind::InvalidConfig, std::string("unknown ") + where + " key '" + k + "'");
  }
}

}  // namespace detail

/// Parses and validates a config object. Missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  detail::reject_unknown(j, {"p", "q", "K", "L", "tol", "n_points", "output_dir"}, "config");
  RunConfig c;
  detail::read_key(j, "p", c.p);
  detail::read_key(j, "q", c.q);
  detail::read_key(j, "K", c.K);
  detail::read_key(j, "L", c.L);
  detail::read_key(j, "n_points", c.n_points);
  detail::read_key(j, "output_dir", c.output_dir);
  if (j.contains("tol")) {
    const auto& t = j.at("tol");
    if (!t.is_object()) throw Error(ErrorKind::InvalidConfig, "config key 'tol' must be an object");
    detail::reject_unknown(t, {"quad_rel", "root_rel", "fd_step_rel", "level_cap"}, "tol");
    detail::read_key(t, "quad_rel", c.tol.quad_rel);
    detail::read_key(t, "root_rel", c.tol.root_rel);
    detail::read_key(t, "fd_step_rel", c.tol.fd_step_rel);
    detail::read_key(t, "level_cap", c.tol.level_cap);
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// Formats a double with 17 significant digits (round-trips binary64).
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // written as "# ..." lines

  void add_row(std::vector<double> r) {
    if (r.size() != header.size()) throw Error(ErrorKind::InternalInconsistency, "CSV row width differs from header");
    rows.push_back(std::move(r));
  }

  std::string str() const {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + fmt17(r[i]);
      out += "\n";
    }
    return out;
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    auto cells = split(line);
    if (!have_header) {
      t.header = cells;
      have_header = true;
      continue;
    }
    std::vector<double> r;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') throw Error(ErrorKind::InvalidConfig, "CSV cell is not a number: " + c);
      r.push_back(v);
    }
    t.add_row(std::move(r));
  }
  return t;
}

/// Writes via a temporary file in the same directory and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidConfig, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- SVG ---------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> xs, ys;
  std::string color = "#1f77b4";
};

struct Marker {
  double x, y;
  std::string label;
};

struct TextLabel {
  double x, y;
  std::string text;
};

struct Plot {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::vector<Marker> markers;
  std::vector<TextLabel> labels;  // in data coordinates
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

/// 800x600 line plot with autoscaled axes (5% margins). Non-finite points
/// are skipped. Output is a pure function of the plot.
inline std::string render_svg(const Plot& plot) {
  constexpr double W = 800, H = 600, left = 80, right = 20, top = 40, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) extend(s.xs[i], s.ys[i]);
  for (const auto& m : plot.markers) extend(m.x, m.y);
  if (!(xmin <= xmax)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  auto pad = [](double& lo, double& hi) {
    double span = hi - lo;
    if (!(span > 0)) span = std::max(1.0, std::abs(lo));
    lo -= 0.05 * span;
    hi += 0.05 * span;
  };
  pad(xmin, xmax);
  pad(ymin, ymax);
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  using detail::px;
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  o += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  o += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
       detail::xml_escape(plot.title) + "</text>\n";
  o += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5, yv = ymin + (ymax - ymin) * i / 5;
    o += "<text x=\"" + px(sx(xv)) + "\" y=\"" + px(top + ph + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick(xv) + "</text>\n";
    o += "<text x=\"" + px(left - 6) + "\" y=\"" + px(sy(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick(yv) + "</text>\n";
  }
  o += "<text x=\"" + px(left + pw / 2) + "\" y=\"" + px(H - 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + detail::xml_escape(plot.xlabel) +
       "</text>\n";
  o += "<text x=\"18\" y=\"" + px(top + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" " +
       "transform=\"rotate(-90 18 " + px(top + ph / 2) + ")\">" + detail::xml_escape(plot.ylabel) + "</text>\n";
  for (const auto& s : plot.series) {
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      pts += (pts.empty() ? "" : " ") + px(sx(s.xs[i])) + "," + px(sy(s.ys[i]));
    }
    o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"><title>" +
         detail::xml_escape(s.name) + "</title></polyline>\n";
  }
  for (const auto& m : plot.markers) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) continue;
    o += "<circle cx=\"" + px(sx(m.x)) + "\" cy=\"" + px(sy(m.y)) + "\" r=\"4\" fill=\"#d62728\"/>\n";
    o += "<text x=\"" + px(sx(m.x) + 7) + "\" y=\"" + px(sy(m.y) - 7) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         detail::xml_escape(m.label) + "</text>\n";
  }
  for (const auto& l : plot.labels) {
    if (!std::isfinite(l.x) || !std::isfinite(l.y)) continue;
    o += "<text x=\"" + px(sx(l.x)) + "\" y=\"" + px(sy(l.y)) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#555555\">" +
         detail::xml_escape(l.text) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

/// Centroid of a simple polygon (shoelace); falls back to the vertex mean
/// when the area vanishes.
inline std::pair<double, double> polygon_centroid(const std::vector<std::pair<double, double>>& poly) {
  double a = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto [x0, y0] = poly[i];
    const auto [x1, y1] = poly[(i + 1) % poly.size()];
    const double cr = x0 * y1 - x1 * y0;
    a += cr;
    cx += (x0 + x1) * cr;
    cy += (y0 + y1) * cr;
  }
  if (std::abs(a) < 1e-300) {
    double mx = 0, my = 0;
    for (const auto& [x, y] : poly) mx += x, my += y;
    return {mx / poly.size(), my / poly.size()};
  }
  return {cx / (3 * a), cy / (3 * a)};
}

}  // namespace bif
