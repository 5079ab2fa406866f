#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lhdeform/errors.hpp"
#include "lhdeform/numkit/special.hpp"
#include "lhdeform/sl2systems.hpp"

namespace lhdeform {

/// Ordered copies of the phase plane, each carrying the family's form.
struct NCopyState {
  std::vector<Point2> points;

  std::size_t size() const { return points.size(); }
  const Point2& operator[](std::size_t i) const { return points.at(i); }

  void require_in(const Chart& chart, const Tolerances& tol = default_tolerances()) const {
    if (points.empty()) throw DomainError("N-copy state needs at least one copy");
    for (const auto& p : points) chart.require(p, tol.domain_margin);
  }
};

/// C = v1 v3 - v2^2, or its deformation C_z = shc(2 z v1) v1 v3 - v2^2.
struct CasimirSpec {
  bool deformed = true;

  template <class T>
  T operator()(double z, const T& v1, const T& v2, const T& v3) const {
    if (!deformed) return v1 * v3 - v2 * v2;
    return shc(2.0 * z * v1) * v1 * v3 - v2 * v2;
  }
};

/// Index pair selecting two copies of an N-copy state (0-based).
struct CopyPair {
  std::size_t first = 0;
  std::size_t second = 1;
};

namespace detail {

template <class T>
void require_exp_range(const T& arg) {
  if (std::abs(value_of(arg)) > kOverflowArgument)
    throw RangeError("coproduct exponential argument " + std::to_string(value_of(arg)) + " out of range");
}

}  // namespace detail

/// Deformed coproduct of the triple on two copies:
///   h1^(2) = h1(p1) + h1(p2),
///   hj^(2) = hj(p1) e^{2 z h1(p2)} + e^{-2 z h1(p1)} hj(p2),  j = 2, 3.
template <class T>
std::array<T, 3> lift(const SL2Realization& r, const Vec2<T>& p1, const Vec2<T>& p2) {
  const T a1 = r.h[0].eval(p1), a2 = r.h[1].eval(p1), a3 = r.h[2].eval(p1);
  const T b1 = r.h[0].eval(p2), b2 = r.h[1].eval(p2), b3 = r.h[2].eval(p2);
  const T right = 2.0 * r.z * b1;
  const T left = -2.0 * r.z * a1;
  detail::require_exp_range(right);
  detail::require_exp_range(left);
  const T er = exp_any(right);
  const T el = exp_any(left);
  return {a1 + b1, a2 * er + el * b2, a3 * er + el * b3};
}

namespace detail {

inline Vec2<Quad> widen(const Point2& p) { return {Quad(p.x), Quad(p.y)}; }

}  // namespace detail

inline std::array<double, 3> lift(const SL2Realization& r, const NCopyState& state, CopyPair pair = {},
                                  const Tolerances& tol = default_tolerances()) {
  state.require_in(r.chart, tol);
  if (pair.first >= state.size() || pair.second >= state.size())
    throw DomainError("copy index out of range");
  const auto l = lift(r, detail::widen(state[pair.first]), detail::widen(state[pair.second]));
  return {static_cast<double>(l[0]), static_cast<double>(l[1]), static_cast<double>(l[2])};
}

/// One-copy Casimir F_z = C_z(h_{z,1}, h_{z,2}, h_{z,3}); constant on the
/// whole chart (c/4 for MP, 1 for CR, -1/4 for 2R). Evaluated in Quad:
/// the two terms of C_z grow like shc(2z h1)^2 and cancel.
inline double casimir_value(const SL2Realization& r, const CasimirSpec& spec, const Point2& p,
                            const Tolerances& tol = default_tolerances()) {
  r.chart.require(p, tol.domain_margin);
  const Quad x = p.x, y = p.y;
  return static_cast<double>(spec(r.z, r.h[0].eval(x, y), r.h[1].eval(x, y), r.h[2].eval(x, y)));
}

inline double casimir_value(const SL2Realization& r, const Point2& p, const Tolerances& tol = default_tolerances()) {
  return casimir_value(r, CasimirSpec{}, p, tol);
}

/// The constant value F_z takes for each family.
inline double expected_casimir(const SL2Realization& r) {
  switch (r.family) {
    case Family::MP: return r.c / 4.0;
    case Family::CR: return 1.0;
    case Family::TwoR: return -0.25;
  }
  return 0.0;
}

template <class T>
T f2_invariant(const SL2Realization& r, const Vec2<T>& p1, const Vec2<T>& p2, const CasimirSpec& spec = {}) {
  const auto l = lift(r, p1, p2);
  return spec(r.z, l[0], l[1], l[2]);
}

/// Two-copy constant of motion F_z^(2) on copies `pair` of `state`,
/// computed through the generic coproduct in Quad precision.
inline double f2_invariant(const SL2Realization& r, const NCopyState& state, CopyPair pair = {},
                           const Tolerances& tol = default_tolerances()) {
  state.require_in(r.chart, tol);
  if (pair.first >= state.size() || pair.second >= state.size())
    throw DomainError("copy index out of range");
  return static_cast<double>(f2_invariant(r, detail::widen(state[pair.first]), detail::widen(state[pair.second])));
}

inline double f2_invariant(const SL2Realization& r, const Point2& p1, const Point2& p2,
                           const Tolerances& tol = default_tolerances()) {
  return f2_invariant(r, NCopyState{{p1, p2}}, CopyPair{}, tol);
}

namespace detail {

template <class F>
F f2_closed_form(const SL2Realization& r, const Vec2<F>& p1, const Vec2<F>& p2) {
  const double z = r.z;
  switch (r.family) {
    case Family::MP: {
      const F x1 = p1.x, y1 = p1.y, x2 = p2.x, y2 = p2.y;
      const F q1 = x1 * x1, q2 = x2 * x2;
      const F s1 = shc(z * q1), s2 = shc(z * q2), s12 = shc(z * (q1 + q2));
      const F cross = x1 * y2 - x2 * y1;
      require_exp_range(z * q1);
      require_exp_range(z * q2);
      return F(0.25) * (s1 * s2 * cross * cross + r.c * s12 * s12 / (s1 * s2) * (q1 + q2) * (q1 + q2) / (q1 * q2)) *
             exp_any(-z * q1) * exp_any(z * q2);
    }
    case Family::CR: {
      const F u1 = p1.x, v1 = p1.y, u2 = p2.x, v2 = p2.y;
      const F a1 = 2.0 * z / v1, a2 = 2.0 * z / v2;
      const F s1 = shc(a1), s2 = shc(a2), s12 = shc(a1 + a2);
      require_exp_range(a1);
      require_exp_range(a2);
      return (s1 * s2 * (u1 - u2) * (u1 - u2) / (v1 * v2) + s12 * s12 / (s1 * s2) * (v1 + v2) * (v1 + v2) / (v1 * v2)) *
             exp_any(a1) * exp_any(-a2);
    }
    case Family::TwoR: {
      const F u1 = p1.x, v1 = p1.y, u2 = p2.x, v2 = p2.y;
      const F d1 = u1 - v1, d2 = u2 - v2;
      const F a1 = 2.0 * z / d1, a2 = 2.0 * z / d2;
      const F s1 = shc(a1), s2 = shc(a2), s12 = shc(a1 + a2);
      require_exp_range(a1);
      require_exp_range(a2);
      const F sum = u1 - u2 + v1 - v2;
      const F bracket =
          s1 * s2 * sum * sum - (exp_any(a1) * d1 / s1 + exp_any(-a2) * d2 / s2) * s12 * (u1 + u2 - v1 - v2);
      return exp_any(-a1) * exp_any(a2) / (F(4) * d1 * d2) * bracket;
    }
  }
  return F(0);
}

}  // namespace detail

/// F_z^(2) from the explicit per-family formulas, independent of the
/// coproduct route. Evaluated in Quad precision.
inline double f2_closed_form(const SL2Realization& r, const Point2& p1, const Point2& p2,
                             const Tolerances& tol = default_tolerances()) {
  r.chart.require(p1, tol.domain_margin);
  r.chart.require(p2, tol.domain_margin);
  return static_cast<double>(detail::f2_closed_form(r, detail::widen(p1), detail::widen(p2)));
}

/// det d(F^(2)_{12}, F^(2)_{13}) / d(x1, y1) on a three-copy state. A
/// nonzero value certifies the two invariants are functionally independent
/// at the state.
inline double independence_test(const SL2Realization& r, const NCopyState& state,
                                const Tolerances& tol = default_tolerances()) {
  if (state.size() != 3) throw DomainError("independence test needs a three-copy state");
  state.require_in(r.chart, tol);
  auto lifted = [](const Point2& p) { return Vec2<Jet1>{Jet1(p.x), Jet1(p.y)}; };
  const Vec2<Jet1> p2 = lifted(state[1]);
  const Vec2<Jet1> p3 = lifted(state[2]);
  auto column = [&](int axis) {
    const Vec2<Jet1> p1{Jet1(state[0].x, axis == 0 ? 1.0 : 0.0), Jet1(state[0].y, axis == 1 ? 1.0 : 0.0)};
    return std::pair{f2_invariant(r, p1, p2).d, f2_invariant(r, p1, p3).d};
  };
  const auto [f12_x, f13_x] = column(0);
  const auto [f12_y, f13_y] = column(1);
  return f12_x * f13_y - f12_y * f13_x;
}

}  // namespace lhdeform
