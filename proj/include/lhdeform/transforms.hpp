#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lhdeform/coalgebra.hpp"
#include "lhdeform/errors.hpp"
#include "lhdeform/geometry.hpp"
#include "lhdeform/sl2systems.hpp"

namespace lhdeform {

/// A planar map evaluable on doubles and first-order jets, so its
/// Jacobian is exact.
struct PointMap {
  std::string name;
  Chart source = Chart::plane();
  std::function<Point2(const Point2&)> f0;
  std::function<Vec2<Jet1>(const Vec2<Jet1>&)> f1;

  template <class F>
  static PointMap from(std::string name, Chart source, F f) {
    return {std::move(name), std::move(source), [f](const Point2& p) { return f(p); },
            [f](const Vec2<Jet1>& p) { return f(p); }};
  }

  static PointMap identity() {
    return from("identity", Chart::plane(), [](const auto& p) { return p; });
  }

  Point2 operator()(const Point2& p) const { return f0(p); }

  /// [[dX/dx, dX/dy], [dY/dx, dY/dy]] at p.
  Mat2 jacobian(const Point2& p) const {
    const Vec2<Jet1> ex = f1({Jet1(p.x, 1.0), Jet1(p.y, 0.0)});
    const Vec2<Jet1> ey = f1({Jet1(p.x, 0.0), Jet1(p.y, 1.0)});
    return {{{ex.x.d, ey.x.d}, {ex.y.d, ey.y.d}}};
  }
};

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Point2 mat_vec(const Mat2& m, const Point2& v) {
  return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
}

enum class Branch { plus, minus };

inline int sign_of(Branch b) { return b == Branch::plus ? 1 : -1; }
inline std::string to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

// Closed-form charts linking a Riccati plane to the MP plane.
// CR -> MP:  x = b c^{1/4} / sqrt|v|,  y = -u x;  inverse u = -y/x, v = s c^{1/2} / x^2.
// 2R -> MP:  x = b (4|c|)^{1/4} / sqrt|u - v|,  y = -(u + v) x / 2;
//            inverse u = s |c|^{1/2}/x^2 - y/x, v = -s |c|^{1/2}/x^2 - y/x.
// b is the sign of x, s the sign of v (CR) or of u - v (2R).
namespace charts {

template <class T>
Vec2<T> cr_to_mp(const Vec2<T>& q, double c, int b, int s) {
  using std::sqrt;
  const T x = b * std::pow(c, 0.25) / sqrt(s * q.y);
  return {x, -1.0 * q.x * x};
}

template <class T>
Vec2<T> mp_to_cr(const Vec2<T>& p, double c, int s) {
  return {-1.0 * p.y / p.x, s * std::sqrt(c) / (p.x * p.x)};
}

template <class T>
Vec2<T> tr_to_mp(const Vec2<T>& q, double c, int b, int s) {
  using std::sqrt;
  const T x = b * std::pow(4.0 * std::abs(c), 0.25) / sqrt(s * (q.x - q.y));
  return {x, -0.5 * (q.x + q.y) * x};
}

template <class T>
Vec2<T> mp_to_tr(const Vec2<T>& p, double c, int s) {
  const T k = s * std::sqrt(std::abs(c)) / (p.x * p.x);
  const T m = p.y / p.x;
  return {k - m, -1.0 * k - m};
}

}  // namespace charts

/// Diffeomorphism between a Riccati half-plane (CR or 2R) and one MP
/// half-plane. `forward` goes Riccati -> MP, `inverse` MP -> Riccati.
struct ChartMap {
  Family family = Family::CR;  ///< Riccati side: CR or TwoR
  Branch branch = Branch::plus;  ///< sign of the MP coordinate x
  int side = 1;  ///< sign of v (CR) or u - v (2R)
  double c = kComplexRiccatiCasimir;
  PointMap forward;
  PointMap inverse;

  /// Riccati half-plane margin, negative on the wrong side.
  double source_margin(const Point2& q) const {
    return family == Family::CR ? side * q.y : side * (q.x - q.y);
  }

  /// Hamiltonian and form scale: h_R = lambda (h_MP o forward) and
  /// omega_R = lambda forward^*(dx^dy).
  double hamiltonian_scale() const {
    return family == Family::CR ? -2.0 * side / std::sqrt(c) : side / std::sqrt(std::abs(c));
  }

  /// kappa with h_MP o forward = kappa h_R: +-(1/2) c^{1/2} for CR and
  /// +-|c|^{1/2} for 2R.
  double multiplicative_constant() const { return 1.0 / hamiltonian_scale(); }

  /// F_MP / F_R = kappa^2 for the quadratic invariants.
  double invariant_scale() const {
    const double k = multiplicative_constant();
    return k * k;
  }

  /// Deformation parameter of the MP partner whose F^(2) transports to the
  /// Riccati F^(2) at z.
  double partner_z(double z) const { return hamiltonian_scale() * z; }
};

inline ChartMap make_cr_map(Branch branch, int side, double c = kComplexRiccatiCasimir) {
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("complex Riccati chart needs c > 0");
  if (side != 1 && side != -1) throw DomainError("side must be +1 or -1");
  ChartMap m;
  m.family = Family::CR;
  m.branch = branch;
  m.side = side;
  m.c = c;
  const int b = sign_of(branch);
  Chart src;
  src.name = side > 0 ? "v>0" : "v<0";
  src.margin = [side](const Point2& q) { return side * q.y; };
  Chart dst;
  dst.name = b > 0 ? "x>0" : "x<0";
  dst.margin = [b](const Point2& p) { return b * p.x; };
  m.forward = PointMap::from("CR->MP", src, [c, b, side](const auto& q) { return charts::cr_to_mp(q, c, b, side); });
  m.inverse = PointMap::from("MP->CR", dst, [c, side](const auto& p) { return charts::mp_to_cr(p, c, side); });
  return m;
}

inline ChartMap make_2r_map(Branch branch, int side, double c = kCoupledRiccatiCasimir) {
  if (!(c != 0) || !std::isfinite(c)) throw DomainError("coupled Riccati chart needs c != 0");
  if (side != 1 && side != -1) throw DomainError("side must be +1 or -1");
  ChartMap m;
  m.family = Family::TwoR;
  m.branch = branch;
  m.side = side;
  m.c = c;
  const int b = sign_of(branch);
  Chart src;
  src.name = side > 0 ? "u>v" : "u<v";
  src.margin = [side](const Point2& q) { return side * (q.x - q.y); };
  Chart dst;
  dst.name = b > 0 ? "x>0" : "x<0";
  dst.margin = [b](const Point2& p) { return b * p.x; };
  m.forward = PointMap::from("2R->MP", src, [c, b, side](const auto& q) { return charts::tr_to_mp(q, c, b, side); });
  m.inverse = PointMap::from("MP->2R", dst, [c, side](const auto& p) { return charts::mp_to_tr(p, c, side); });
  return m;
}

inline ChartMap make_chart_map(Family riccati, Branch branch, int side) {
  switch (riccati) {
    case Family::CR: return make_cr_map(branch, side);
    case Family::TwoR: return make_2r_map(branch, side);
    case Family::MP: break;
  }
  throw DomainError("chart maps link MP to CR or 2R; got MP");
}

namespace detail {

inline void require_side(const PointMap& f, const Point2& p, double margin) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite point");
  const double m = f.source.margin(p);
  if (m < 0)
    throw BranchError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") lies outside half-plane '" +
                      f.source.name + "' of map " + f.name);
  if (!(m > margin)) throw DomainError("point on the singular set of map " + f.name);
}

}  // namespace detail

/// Applies a map after checking its source chart.
inline Point2 map_point(const PointMap& f, const Point2& p, const Tolerances& tol = default_tolerances()) {
  detail::require_side(f, p, tol.domain_margin);
  return f(p);
}

/// Riccati -> MP.
inline Point2 map_point(const ChartMap& m, const Point2& q, const Tolerances& tol = default_tolerances()) {
  return map_point(m.forward, q, tol);
}

/// MP -> Riccati.
inline Point2 unmap_point(const ChartMap& m, const Point2& p, const Tolerances& tol = default_tolerances()) {
  return map_point(m.inverse, p, tol);
}

/// Side of a Riccati point (sign of v or u - v), or nullopt on the
/// singular set.
inline std::optional<int> infer_side(Family riccati, const Point2& q) {
  const double s = riccati == Family::CR ? q.y : q.x - q.y;
  if (s > 0) return 1;
  if (s < 0) return -1;
  return std::nullopt;
}

/// Tries both branches for the MP preimage and reports which one matched.
struct BranchMatch {
  Branch branch;
  Point2 image;
};

inline BranchMatch invert_any_branch(Family riccati, int side, const Point2& p,
                                     const Tolerances& tol = default_tolerances()) {
  for (Branch b : {Branch::plus, Branch::minus}) {
    const ChartMap m = make_chart_map(riccati, b, side);
    try {
      return {b, unmap_point(m, p, tol)};
    } catch (const BranchError&) {
    }
  }
  throw BranchError("no branch accepts the point");
}

/// ||J_f(p) X_src(p) - X_dst(f(p))||.
inline double pushforward_check(const PointMap& f, const PlaneVectorField& X_src, const PlaneVectorField& X_dst,
                                const Point2& p, const Tolerances& tol = default_tolerances()) {
  detail::require_side(f, p, tol.domain_margin);
  const Point2 q = f(p);
  return norm(mat_vec(f.jacobian(p), X_src.at(p, tol)) - X_dst.at(q, tol));
}

inline double pushforward_check(const ChartMap& m, const PlaneVectorField& X_src, const PlaneVectorField& X_dst,
                                const Point2& p, const Tolerances& tol = default_tolerances()) {
  return pushforward_check(m.forward, X_src, X_dst, p, tol);
}

/// Size of the two vectors compared by pushforward_check.
inline double pushforward_scale(const PointMap& f, const PlaneVectorField& X_src, const PlaneVectorField& X_dst,
                                const Point2& p, const Tolerances& tol = default_tolerances()) {
  detail::require_side(f, p, tol.domain_margin);
  return std::max(norm(mat_vec(f.jacobian(p), X_src.at(p, tol))), norm(X_dst.at(f(p), tol)));
}

/// Density of inverse^*(omega_R) relative to dx^dy at an MP point:
/// W_R(inverse(p)) det J_inverse(p). Equals 1 / hamiltonian_scale().
inline double pullback_density(const ChartMap& m, const SymplecticDensity& W_riccati, const Point2& p,
                               const Tolerances& tol = default_tolerances()) {
  detail::require_side(m.inverse, p, tol.domain_margin);
  const Point2 q = m.inverse(p);
  return W_riccati.at(q, tol) * det(m.inverse.jacobian(p));
}

/// MP realization whose fields, Hamiltonians and F^(2) correspond to the
/// Riccati realization `riccati` under `m`.
inline SL2Realization mp_partner(const ChartMap& m, const SL2Realization& riccati) {
  if (riccati.family != m.family) throw DomainError("realization family does not match chart map");
  return build_realization(Family::MP, m.partner_z(riccati.z), m.c);
}

/// Riccati F^(2) predicted from MP data: F^(2)_MP at partner_z on the
/// mapped copies divided by invariant_scale(). Compare against f2_invariant on the
/// Riccati side.
inline double transported_f2(const ChartMap& m, const SL2Realization& riccati, const Point2& q1, const Point2& q2,
                             const Tolerances& tol = default_tolerances()) {
  const SL2Realization mp = mp_partner(m, riccati);
  const Point2 p1 = map_point(m, q1, tol);
  const Point2 p2 = map_point(m, q2, tol);
  return f2_invariant(mp, p1, p2) / m.invariant_scale();
}

}  // namespace lhdeform
