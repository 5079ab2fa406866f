#pragma once

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lhdeform/coeffexpr.hpp"
#include "lhdeform/errors.hpp"
#include "lhdeform/integrator.hpp"
#include "lhdeform/sl2systems.hpp"
#include "lhdeform/transforms.hpp"

namespace lhdeform::cli {

enum class Format { csv, json };

/// Everything a command needs, parsed and validated up front.
struct RunConfig {
  Family family = Family::MP;
  double z = 0.3;
  double c = 4.0;
  /// Coefficient expressions b1, b2, b3 in the coeffexpr grammar. For MP,
  /// `omega2` sets b1 and fixes b2 = 0, b3 = 1.
  std::array<std::string, 3> b{"1 + 0.2*cos(t)", "0", "1"};
  std::vector<Point2> states{{1.0, 0.0}, {2.0, 1.0}};
  double t0 = 0.0;
  double t1 = 10.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  int samples = 101;
  TwoCopyFlow flow = TwoCopyFlow::coproduct;
  double drift_tol = 1e-6;
  std::uint64_t seed = 20260101;
  std::optional<Format> format;  ///< unset: the command's natural format
  std::string out;               ///< empty: standard output

  // verify
  std::vector<Family> families{Family::MP, Family::CR, Family::TwoR};
  std::vector<double> zs{0.0, 0.1, -0.1, 1.0, -1.0};
  std::vector<double> cs{-2.0, 0.5, 4.0};
  int points = 200;
  std::string inject_fault;  ///< "h2": flip the sign of h2 (negative control)

  // map
  Family map_family = Family::CR;
  Branch branch = Branch::plus;
  std::optional<int> side;  ///< unset: inferred from the point
  bool inverse = false;
  Point2 point{-1.0, 2.0};

  // pdm
  std::vector<double> pdm_zs{0.0, 0.5, 1.0, 2.0};
  double x_min = -3.0;
  double x_max = 3.0;
  int count = 121;

  CoefficientSet coefficients() const {
    CoefficientSet out;
    for (std::size_t i = 0; i < 3; ++i) out.b[i] = expr::as_function(expr::parse(b[i]));
    return out;
  }
};

struct ConfigResult {
  RunConfig config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    out.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

inline std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<Point2> to_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) return std::nullopt;
  const auto a = to_double(parts[0]), b = to_double(parts[1]);
  if (!a || !b) return std::nullopt;
  return Point2{*a, *b};
}

class Reader {
 public:
  explicit Reader(ConfigResult& r) : r_(r) {}

  void apply(const std::string& key, const std::string& value, const std::string& where) {
    RunConfig& c = r_.config;
    where_ = where;
    key_ = key;
    if (key == "family") family(value, c.family);
    else if (key == "z") number(value, c.z);
    else if (key == "c") number(value, c.c);
    else if (key == "omega2") {
      expression(value, c.b[0]);
      c.b[1] = "0";
      c.b[2] = "1";
    } else if (key == "b1") expression(value, c.b[0]);
    else if (key == "b2") expression(value, c.b[1]);
    else if (key == "b3") expression(value, c.b[2]);
    else if (key == "state" || key == "states") points(value, c.states);
    else if (key == "t0") number(value, c.t0);
    else if (key == "t1") number(value, c.t1);
    else if (key == "rtol") number(value, c.rtol);
    else if (key == "atol") number(value, c.atol);
    else if (key == "samples") integer(value, c.samples);
    else if (key == "flow") {
      if (const auto f = parse_two_copy_flow(value)) c.flow = *f;
      else fail("expected coproduct or diagonal, got '" + value + "'");
    } else if (key == "drift_tol") number(value, c.drift_tol);
    else if (key == "seed") {
      const auto v = to_int(value);
      if (v && *v >= 0) c.seed = static_cast<std::uint64_t>(*v);
      else fail("expected a non-negative integer, got '" + value + "'");
    } else if (key == "format") {
      if (value == "csv") c.format = Format::csv;
      else if (value == "json") c.format = Format::json;
      else fail("expected csv or json, got '" + value + "'");
    } else if (key == "out") c.out = value;
    else if (key == "families") {
      c.families.clear();
      for (const auto& f : split(value, ',')) {
        Family fam{};
        if (family(f, fam)) c.families.push_back(fam);
      }
    } else if (key == "zs") numbers(value, c.zs);
    else if (key == "cs") numbers(value, c.cs);
    else if (key == "points") integer(value, c.points);
    else if (key == "inject_fault") {
      if (value == "h2" || value.empty()) c.inject_fault = value;
      else fail("only 'h2' can be injected, got '" + value + "'");
    } else if (key == "map") family(value, c.map_family);
    else if (key == "branch") {
      if (value == "plus") c.branch = Branch::plus;
      else if (value == "minus") c.branch = Branch::minus;
      else fail("expected plus or minus, got '" + value + "'");
    } else if (key == "side") {
      int s = 0;
      if (value == "auto") c.side.reset();
      else if (integer(value, s)) {
        if (s == 1 || s == -1) c.side = s;
        else fail("expected 1, -1 or auto");
      }
    } else if (key == "direction") {
      if (value == "forward") c.inverse = false;
      else if (value == "inverse") c.inverse = true;
      else fail("expected forward or inverse, got '" + value + "'");
    } else if (key == "point") {
      if (const auto p = to_point(value)) c.point = *p;
      else fail("expected 'a, b', got '" + value + "'");
    } else if (key == "pdm_zs") numbers(value, c.pdm_zs);
    else if (key == "x_min") number(value, c.x_min);
    else if (key == "x_max") number(value, c.x_max);
    else if (key == "count") integer(value, c.count);
    else r_.errors.push_back(where + ": unknown key '" + key + "'");
  }

 private:
  ConfigResult& r_;
  std::string where_;
  std::string key_;

  void fail(const std::string& what) { r_.errors.push_back(where_ + ": " + key_ + ": " + what); }

  bool number(const std::string& v, double& out) {
    if (const auto d = to_double(v)) {
      out = *d;
      return true;
    }
    fail("expected a finite number, got '" + v + "'");
    return false;
  }

  bool integer(const std::string& v, int& out) {
    const auto i = to_int(v);
    if (i && *i >= -(1LL << 30) && *i <= (1LL << 30)) {
      out = static_cast<int>(*i);
      return true;
    }
    fail("expected an integer, got '" + v + "'");
    return false;
  }

  void numbers(const std::string& v, std::vector<double>& out) {
    out.clear();
    for (const auto& s : split(v, ',')) {
      double d = 0;
      if (number(s, d)) out.push_back(d);
    }
  }

  void points(const std::string& v, std::vector<Point2>& out) {
    out.clear();
    for (const auto& s : split(v, ';')) {
      if (const auto p = to_point(s)) out.push_back(*p);
      else fail("expected 'x, y' per copy, got '" + s + "'");
    }
  }

  bool family(const std::string& v, Family& out) {
    if (const auto f = parse_family(v)) {
      out = *f;
      return true;
    }
    fail("expected MP, CR or 2R, got '" + v + "'");
    return false;
  }

  void expression(const std::string& v, std::string& out) {
    try {
      expr::parse(v);
      out = v;
    } catch (const ParseError& e) {
      fail(std::string("bad expression '") + v + "': " + e.what());
    }
  }
};

inline void validate(ConfigResult& r) {
  const RunConfig& c = r.config;
  auto err = [&](const std::string& s) { r.errors.push_back(s); };
  if (!(c.t1 > c.t0)) err("t1 must be greater than t0");
  if (!(c.rtol > 0)) err("rtol must be positive");
  if (!(c.atol > 0)) err("atol must be positive");
  if (c.samples < 2) err("samples must be at least 2");
  if (!(c.drift_tol > 0)) err("drift_tol must be positive");
  if (c.states.empty()) err("state needs at least one copy");
  if (c.families.empty()) err("families must not be empty");
  if (c.zs.empty()) err("zs must not be empty");
  if (c.points < 1) err("points must be at least 1");
  if (c.count < 1) err("count must be at least 1");
  if (!(c.x_max >= c.x_min)) err("x_max must not be below x_min");
  if (c.map_family == Family::MP) err("map must be CR or 2R");
  try {
    const SL2Realization real = build_realization(c.family, c.z, c.c);
    for (std::size_t i = 0; i < c.states.size(); ++i)
      if (!real.chart.contains(c.states[i], default_tolerances().domain_margin))
        err("state copy " + std::to_string(i + 1) + " lies outside the " + to_string(c.family) + " chart");
  } catch (const Error& e) {
    err(std::string("realization: ") + e.what());
  }
}

}  // namespace detail

/// Parses `key = value` lines ('#' starts a comment), then applies
/// `overrides` in order, then validates. All problems are collected.
inline ConfigResult parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                                 const std::string& origin = "config") {
  ConfigResult r;
  detail::Reader reader(r);
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(n);
    if (eq == std::string::npos) {
      r.errors.push_back(where + ": expected 'key = value'");
      continue;
    }
    reader.apply(detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)), where);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      r.errors.push_back("--set " + o + ": expected 'key=value'");
      continue;
    }
    reader.apply(detail::trim(o.substr(0, eq)), detail::trim(o.substr(eq + 1)), "--set");
  }
  detail::validate(r);
  return r;
}

inline ConfigResult load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream f(path);
  if (!f) {
    ConfigResult r;
    r.errors.push_back(path + ": cannot open: " + std::strerror(errno));
    return r;
  }
  std::ostringstream text;
  text << f.rdbuf();
  return parse_config(text.str(), overrides, path);
}

}  // namespace lhdeform::cli
