#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lhdeform/coalgebra.hpp"
#include "lhdeform/geometry.hpp"
#include "lhdeform/sl2systems.hpp"

namespace lhdeform {

/// Family-specific sampling boxes kept 0.3 away from the singular set:
///   MP  |x| in [0.3, 3], |y| <= 3
///   CR  u in [-3, 3], |v| in [0.3, 3]
///   2R  (u + v)/2 in [-3, 3], |u - v| in [0.3, 3]
struct SamplingBox {
  double near = 0.3;
  double far = 3.0;
  double free = 3.0;

  std::string describe(Family f) const {
    const std::string a = std::to_string(near), b = std::to_string(far), w = std::to_string(free);
    switch (f) {
      case Family::MP: return "|x| in [" + a + ", " + b + "], |y| <= " + w;
      case Family::CR: return "|u| <= " + w + ", |v| in [" + a + ", " + b + "]";
      case Family::TwoR: return "|(u+v)/2| <= " + w + ", |u-v| in [" + a + ", " + b + "]";
    }
    return "";
  }
};

class PointSampler {
 public:
  PointSampler(Family family, std::uint64_t seed, SamplingBox box = {}) : family_(family), box_(box), rng_(seed) {}

  Point2 next() {
    std::uniform_real_distribution<double> away(box_.near, box_.far);
    std::uniform_real_distribution<double> free(-box_.free, box_.free);
    std::bernoulli_distribution flip(0.5);
    const double d = flip(rng_) ? away(rng_) : -away(rng_);
    const double w = free(rng_);
    switch (family_) {
      case Family::MP: return {d, w};
      case Family::CR: return {w, d};
      case Family::TwoR: return {w + 0.5 * d, w - 0.5 * d};
    }
    return {};
  }

  std::vector<Point2> take(std::size_t n) {
    std::vector<Point2> out(n);
    for (auto& p : out) p = next();
    return out;
  }

 private:
  Family family_;
  SamplingBox box_;
  std::mt19937_64 rng_;
};

/// Stream seed derived from a user seed and a configuration index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct IdentityResult {
  std::string suite;
  std::string identity;
  std::string measure;  ///< "rel" or "abs"
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  Point2 worst_point;
  bool pass = false;
};

struct SuiteThresholds {
  double bracket_rel = 1e-9;
  double casimir_abs = 1e-11;
  double commutator_rel = 1e-8;
  double hamiltonian_rel = 1e-10;
  double lie_abs = 1e-10;
  double classical_rel = 1e-12;
};

namespace detail {

class Accumulator {
 public:
  Accumulator(std::string suite, std::string identity, std::string measure, double tol)
      : r_{std::move(suite), std::move(identity), std::move(measure), 0, 0.0, tol, {}, false} {}

  void add(double residual, const Point2& p) {
    ++r_.samples;
    if (!(residual <= r_.max_residual)) {
      r_.max_residual = std::isnan(residual) ? HUGE_VAL : residual;
      r_.worst_point = p;
    }
  }

  IdentityResult done() {
    r_.pass = r_.max_residual <= r_.tolerance;
    return r_;
  }

 private:
  IdentityResult r_;
};

inline std::array<ScalarField, 3> classical_hamiltonians(Family f, double c) {
  const Chart chart = family_chart(f);
  auto field = [&](auto fn) { return ScalarField::from(fn, chart); };
  switch (f) {
    case Family::MP:
      return {field([](const auto& x, const auto&) { return 0.5 * x * x; }),
              field([](const auto& x, const auto& y) { return -0.5 * x * y; }),
              field([c](const auto& x, const auto& y) { return 0.5 * (y * y + c / (x * x)); })};
    case Family::CR:
      return {field([](const auto&, const auto& v) { return -1.0 / v; }),
              field([](const auto& u, const auto& v) { return -1.0 * u / v; }),
              field([](const auto& u, const auto& v) { return -1.0 * (u * u + v * v) / v; })};
    case Family::TwoR:
      return {field([](const auto& u, const auto& v) { return 1.0 / (u - v); }),
              field([](const auto& u, const auto& v) { return 0.5 * (u + v) / (u - v); }),
              field([](const auto& u, const auto& v) { return u * v / (u - v); })};
  }
  return {};
}

}  // namespace detail

/// Non-deformed Hamiltonians written out directly.
inline std::array<ScalarField, 3> classical_hamiltonians(Family f, double c) {
  return detail::classical_hamiltonians(f, c);
}

/// {h1,h2} = -shc(2z h1) h1, {h1,h3} = -2 h2, {h2,h3} = -ch(2z h1) h3.
inline std::vector<IdentityResult> bracket_suite(const SL2Realization& r, const std::vector<Point2>& pts,
                                                 const SuiteThresholds& th = {},
                                                 const Tolerances& tol = default_tolerances()) {
  detail::Accumulator a12("bracket", "{h1,h2} = -shc(2z h1) h1", "rel", th.bracket_rel);
  detail::Accumulator a13("bracket", "{h1,h3} = -2 h2", "rel", th.bracket_rel);
  detail::Accumulator a23("bracket", "{h2,h3} = -ch(2z h1) h3", "rel", th.bracket_rel);
  for (const auto& p : pts) {
    const auto h = r.hamiltonians(p, tol);
    const double w = 2.0 * r.z * h[0];
    auto check = [&](detail::Accumulator& acc, int i, int j, double expected) {
      const auto& f = r.h[static_cast<std::size_t>(i)];
      const auto& g = r.h[static_cast<std::size_t>(j)];
      const double got = poisson_bracket(f, g, r.W, p, tol);
      acc.add(relative_residual(got, expected, poisson_bracket_scale(f, g, r.W, p, tol)), p);
    };
    check(a12, 0, 1, -shc(w) * h[0]);
    check(a13, 0, 2, -2.0 * h[1]);
    check(a23, 1, 2, -ch(w) * h[2]);
  }
  return {a12.done(), a13.done(), a23.done()};
}

/// F_z = C_z(h1, h2, h3) equals its family constant.
inline std::vector<IdentityResult> casimir_suite(const SL2Realization& r, const std::vector<Point2>& pts,
                                                 const SuiteThresholds& th = {},
                                                 const Tolerances& tol = default_tolerances()) {
  const double expected = expected_casimir(r);
  detail::Accumulator acc("casimir", "F_z = " + std::to_string(expected), "abs", th.casimir_abs);
  for (const auto& p : pts) acc.add(std::abs(casimir_value(r, p, tol) - expected), p);
  return {acc.done()};
}

/// [X1,X2] = g12 X1, [X1,X3] = 2 X2, [X2,X3] = g23_3 X3 + g23_1 X1.
inline std::vector<IdentityResult> commutator_suite(const SL2Realization& r, const std::vector<Point2>& pts,
                                                    const SuiteThresholds& th = {},
                                                    const Tolerances& tol = default_tolerances()) {
  detail::Accumulator a12("commutator", "[X1,X2] = ch(2z h1) X1", "rel", th.commutator_rel);
  detail::Accumulator a13("commutator", "[X1,X3] = 2 X2", "rel", th.commutator_rel);
  detail::Accumulator a23("commutator", "[X2,X3] = ch(2z h1) X3 + g(z) X1", "rel", th.commutator_rel);
  for (const auto& p : pts) {
    const StructureFunctions s = r.structure(p);
    const Point2 x1 = r.X[0].at(p, tol), x2 = r.X[1].at(p, tol), x3 = r.X[2].at(p, tol);
    auto check = [&](detail::Accumulator& acc, int i, int j, const Point2& expected) {
      const auto& X = r.X[static_cast<std::size_t>(i)];
      const auto& Y = r.X[static_cast<std::size_t>(j)];
      const Point2 got = commutator(X, Y, p, tol);
      acc.add(relative_residual(got, expected, norm(commutator_scale(X, Y, p, tol))), p);
    };
    check(a12, 0, 1, s.g12 * x1);
    check(a13, 0, 2, 2.0 * x2);
    check(a23, 1, 2, s.g23_3 * x3 + s.g23_1 * x1);
  }
  return {a12.done(), a13.done(), a23.done()};
}

/// X_{h_i} equals the closed-form X_i.
inline std::vector<IdentityResult> hamiltonian_suite(const SL2Realization& r, const std::vector<Point2>& pts,
                                                     const SuiteThresholds& th = {},
                                                     const Tolerances& tol = default_tolerances()) {
  std::vector<IdentityResult> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const PlaneVectorField Xh = hamiltonian_field(r.h[i], r.W);
    detail::Accumulator acc("hamiltonian-field", "X_{h" + std::to_string(i + 1) + "} = X" + std::to_string(i + 1),
                            "rel", th.hamiltonian_rel);
    for (const auto& p : pts) acc.add(relative_residual(Xh.at(p, tol), r.X[i].at(p, tol)), p);
    out.push_back(acc.done());
  }
  return out;
}

/// L_{X_i} omega = 0.
inline std::vector<IdentityResult> lie_derivative_suite(const SL2Realization& r, const std::vector<Point2>& pts,
                                                        const SuiteThresholds& th = {},
                                                        const Tolerances& tol = default_tolerances()) {
  std::vector<IdentityResult> out;
  for (std::size_t i = 0; i < 3; ++i) {
    detail::Accumulator acc("lie-derivative", "L_{X" + std::to_string(i + 1) + "} omega = 0", "abs", th.lie_abs);
    for (const auto& p : pts) acc.add(std::abs(lie_derivative_omega(r.X[i], r.W, p, tol)), p);
    out.push_back(acc.done());
  }
  return out;
}

/// At z = 0 the triple coincides with the non-deformed Hamiltonians and
/// closes under {h1,h2} = -h1, {h1,h3} = -2h2, {h2,h3} = -h3.
inline std::vector<IdentityResult> classical_limit_suite(Family family, double c, const std::vector<Point2>& pts,
                                                         const SuiteThresholds& th = {},
                                                         const Tolerances& tol = default_tolerances()) {
  const SL2Realization r = build_realization(family, 0.0, c);
  const auto h0 = classical_hamiltonians(family, r.c);
  std::vector<IdentityResult> out;
  for (std::size_t i = 0; i < 3; ++i) {
    detail::Accumulator acc("classical-limit", "h_{0," + std::to_string(i + 1) + "} = h" + std::to_string(i + 1),
                            "rel", th.classical_rel);
    for (const auto& p : pts) acc.add(relative_residual(r.h[i](p), h0[i](p), 1.0), p);
    out.push_back(acc.done());
  }
  detail::Accumulator b12("classical-limit", "{h1,h2} = -h1", "rel", th.classical_rel);
  detail::Accumulator b13("classical-limit", "{h1,h3} = -2 h2", "rel", th.classical_rel);
  detail::Accumulator b23("classical-limit", "{h2,h3} = -h3", "rel", th.classical_rel);
  const SymplecticDensity& W = r.W;
  for (const auto& p : pts) {
    auto rel = [&](int i, int j, double expected) {
      const auto& f = h0[static_cast<std::size_t>(i)];
      const auto& g = h0[static_cast<std::size_t>(j)];
      return relative_residual(poisson_bracket(f, g, W, p, tol), expected, poisson_bracket_scale(f, g, W, p, tol));
    };
    b12.add(rel(0, 1, -h0[0](p)), p);
    b13.add(rel(0, 2, -2.0 * h0[1](p)), p);
    b23.add(rel(1, 2, -h0[2](p)), p);
  }
  out.push_back(b12.done());
  out.push_back(b13.done());
  out.push_back(b23.done());
  return out;
}

}  // namespace lhdeform
