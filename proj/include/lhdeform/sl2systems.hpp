#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lhdeform/errors.hpp"
#include "lhdeform/geometry.hpp"
#include "lhdeform/numkit/special.hpp"

namespace lhdeform {

enum class Family { MP, CR, TwoR };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::MP: return "MP";
    case Family::CR: return "CR";
    case Family::TwoR: return "2R";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  if (s == "MP" || s == "mp") return Family::MP;
  if (s == "CR" || s == "cr") return Family::CR;
  if (s == "2R" || s == "2r") return Family::TwoR;
  return std::nullopt;
}

/// Casimir normalization the complex and coupled Riccati realizations are
/// built for.
inline constexpr double kComplexRiccatiCasimir = 4.0;
inline constexpr double kCoupledRiccatiCasimir = -1.0;

// Closed-form Hamiltonians and vector fields, generic over the jet type.
// Deformation enters only through shc and ch of a single argument
// (z x^2, 2z/v, 2z/(u - v)), all even functions, so z = 0 reproduces the
// classical expressions exactly.

namespace milne_pinney {

template <class T> T h1(const T& x, const T&, double) { return 0.5 * x * x; }
template <class T> T h2(const T& x, const T& y, double z) { return -0.5 * shc(z * x * x) * x * y; }
template <class T> T h3(const T& x, const T& y, double z, double c) {
  const T s = shc(z * x * x);
  if (c == 0.0) return 0.5 * s * y * y;
  return 0.5 * (s * y * y + c / (s * x * x));
}

template <class T> Vec2<T> X1(const T& x, const T&, double) { return {T(0.0), -1.0 * x}; }
template <class T> Vec2<T> X2(const T& x, const T& y, double z) {
  const T w = z * x * x;
  const T s = shc(w);
  return {-0.5 * s * x, (ch(w) - 0.5 * s) * y};
}
// (shc(w) - ch(w)) / x is written as -z x shc'(w), regular at x = 0.
template <class T> Vec2<T> X3(const T& x, const T& y, double z, double c) {
  const T w = z * x * x;
  const T s = shc(w);
  const T drift = -z * x * shc_prime(w) * y * y;
  if (c == 0.0) return {s * y, drift};
  return {s * y, c / (x * x * x) * ch(w) / (s * s) + drift};
}

}  // namespace milne_pinney

namespace complex_riccati {

template <class T> T arg(const T& v, double z) { return 2.0 * z / v; }

template <class T> T h1(const T&, const T& v, double) { return -1.0 / v; }
template <class T> T h2(const T& u, const T& v, double z) { return -shc(arg(v, z)) * u / v; }
template <class T> T h3(const T& u, const T& v, double z) {
  const T s = shc(arg(v, z));
  return -(s * s * u * u + v * v) / (s * v);
}

template <class T> Vec2<T> X1(const T&, const T&, double) { return {T(1.0), T(0.0)}; }
template <class T> Vec2<T> X2(const T& u, const T& v, double z) {
  const T a = arg(v, z);
  return {u * ch(a), v * shc(a)};
}
template <class T> Vec2<T> X3(const T& u, const T& v, double z) {
  const T a = arg(v, z);
  const T s = shc(a);
  return {(u * u - v * v / (s * s)) * ch(a), 2.0 * u * v * s};
}

template <class T> T density(const T&, const T& v) { return 1.0 / (v * v); }

}  // namespace complex_riccati

namespace coupled_riccati {

template <class T> T arg(const T& u, const T& v, double z) { return 2.0 * z / (u - v); }

template <class T> T h1(const T& u, const T& v, double) { return 1.0 / (u - v); }
template <class T> T h2(const T& u, const T& v, double z) {
  return 0.5 * shc(arg(u, v, z)) * (u + v) / (u - v);
}
template <class T> T h3(const T& u, const T& v, double z) {
  const T s = shc(arg(u, v, z));
  const T d = u - v;
  const T p = u + v;
  return (s * s * p * p - d * d) / (4.0 * s * d);
}

template <class T> Vec2<T> X1(const T&, const T&, double) { return {T(1.0), T(1.0)}; }
template <class T> Vec2<T> X2(const T& u, const T& v, double z) {
  const T a = arg(u, v, z);
  const T even = 0.5 * (u + v) * ch(a);
  const T odd = 0.5 * (u - v) * shc(a);
  return {even + odd, even - odd};
}
template <class T> Vec2<T> X3(const T& u, const T& v, double z) {
  const T a = arg(u, v, z);
  const T s = shc(a);
  const T d = u - v;
  const T p = u + v;
  const T even = 0.25 * (p * p + d * d / (s * s)) * ch(a);
  const T odd = 0.5 * (u * u - v * v) * s;
  return {even + odd, even - odd};
}

template <class T> T density(const T& u, const T& v) { return 1.0 / ((u - v) * (u - v)); }

}  // namespace coupled_riccati

/// Coefficient functions of the deformed commutators
///   [X1, X2] = g12 X1,  [X1, X3] = 2 X2,  [X2, X3] = g23_3 X3 + g23_1 X1.
struct StructureFunctions {
  double g12 = 1.0;
  double g23_3 = 1.0;
  double g23_1 = 0.0;
};

/// A deformed sl(2) Lie-Hamilton triple on its chart. Public members so
/// callers (and test fixtures) can inspect or replace pieces.
struct SL2Realization {
  Family family = Family::MP;
  double z = 0.0;
  double c = 0.0;
  Chart chart;
  SymplecticDensity W;
  std::array<ScalarField, 3> h;
  std::array<PlaneVectorField, 3> X;
  std::function<StructureFunctions(const Point2&)> structure;

  /// Hamiltonian triple (h_{z,1}, h_{z,2}, h_{z,3}) at p.
  std::array<double, 3> hamiltonians(const Point2& p, const Tolerances& tol = default_tolerances()) const {
    chart.require(p, tol.domain_margin);
    return {h[0](p), h[1](p), h[2](p)};
  }
};

/// Domain of a family. MP with c = 0 is regular on the whole plane.
inline Chart family_chart(Family f, double c = 1.0) {
  Chart chart;
  switch (f) {
    case Family::MP:
      if (c == 0.0) return Chart::plane();
      chart.name = "x!=0";
      chart.margin = [](const Point2& p) { return std::abs(p.x); };
      break;
    case Family::CR:
      chart.name = "v!=0";
      chart.margin = [](const Point2& p) { return std::abs(p.y); };
      break;
    case Family::TwoR:
      chart.name = "u!=v";
      chart.margin = [](const Point2& p) { return std::abs(p.x - p.y); };
      break;
  }
  return chart;
}

/// Builds the deformed triple for `family`. z = 0 gives the classical
/// system. For CR and 2R the Casimir constant is fixed (4 and -1) and `c`
/// is ignored.
inline SL2Realization build_realization(Family family, double z, double c = 0.0) {
  if (!std::isfinite(z)) throw DomainError("deformation parameter must be finite");
  if (!std::isfinite(c)) throw DomainError("Casimir constant must be finite");
  SL2Realization r;
  r.family = family;
  r.z = z;
  r.chart = family_chart(family, c);
  const Chart chart = r.chart;

  auto field = [&](auto fn) { return ScalarField::from(fn, chart); };
  auto vfield = [&](auto fn) {
    return PlaneVectorField{field([fn](const auto& x, const auto& y) { return fn(x, y).x; }),
                            field([fn](const auto& x, const auto& y) { return fn(x, y).y; }), chart};
  };

  switch (family) {
    case Family::MP: {
      namespace k = milne_pinney;
      r.c = c;
      r.W = SymplecticDensity{field([](const auto&, const auto&) { return 1.0; })};
      r.h = {field([z](const auto& x, const auto& y) { return k::h1(x, y, z); }),
             field([z](const auto& x, const auto& y) { return k::h2(x, y, z); }),
             field([z, c](const auto& x, const auto& y) { return k::h3(x, y, z, c); })};
      r.X = {vfield([z](const auto& x, const auto& y) { return k::X1(x, y, z); }),
             vfield([z](const auto& x, const auto& y) { return k::X2(x, y, z); }),
             vfield([z, c](const auto& x, const auto& y) { return k::X3(x, y, z, c); })};
      r.structure = [z, c](const Point2& p) {
        const double w = z * p.x * p.x;
        const double s = shc(w);
        return StructureFunctions{ch(w), ch(w), z * z * (c + p.x * p.x * p.y * p.y * s * s)};
      };
      break;
    }
    case Family::CR: {
      namespace k = complex_riccati;
      r.c = kComplexRiccatiCasimir;
      r.W = SymplecticDensity{field([](const auto& u, const auto& v) { return k::density(u, v); })};
      r.h = {field([z](const auto& u, const auto& v) { return k::h1(u, v, z); }),
             field([z](const auto& u, const auto& v) { return k::h2(u, v, z); }),
             field([z](const auto& u, const auto& v) { return k::h3(u, v, z); })};
      r.X = {vfield([z](const auto& u, const auto& v) { return k::X1(u, v, z); }),
             vfield([z](const auto& u, const auto& v) { return k::X2(u, v, z); }),
             vfield([z](const auto& u, const auto& v) { return k::X3(u, v, z); })};
      r.structure = [z](const Point2& p) {
        const double a = 2.0 * z / p.y;
        const double s = shc(a);
        return StructureFunctions{ch(a), ch(a), 4.0 * z * z * (1.0 + p.x * p.x / (p.y * p.y) * s * s)};
      };
      break;
    }
    case Family::TwoR: {
      namespace k = coupled_riccati;
      r.c = kCoupledRiccatiCasimir;
      r.W = SymplecticDensity{field([](const auto& u, const auto& v) { return k::density(u, v); })};
      r.h = {field([z](const auto& u, const auto& v) { return k::h1(u, v, z); }),
             field([z](const auto& u, const auto& v) { return k::h2(u, v, z); }),
             field([z](const auto& u, const auto& v) { return k::h3(u, v, z); })};
      r.X = {vfield([z](const auto& u, const auto& v) { return k::X1(u, v, z); }),
             vfield([z](const auto& u, const auto& v) { return k::X2(u, v, z); }),
             vfield([z](const auto& u, const auto& v) { return k::X3(u, v, z); })};
      r.structure = [z](const Point2& p) {
        const double d = p.x - p.y;
        const double a = 2.0 * z / d;
        const double s = shc(a);
        const double q = (p.x + p.y) / d;
        return StructureFunctions{ch(a), ch(a), -z * z * (1.0 - q * q * s * s)};
      };
      break;
    }
  }
  return r;
}

/// Time-dependent coefficients b_i(t) multiplying X_{z,i}.
struct CoefficientSet {
  std::array<std::function<double(double)>, 3> b;

  static CoefficientSet constant(double b1, double b2, double b3) {
    return {{[b1](double) { return b1; }, [b2](double) { return b2; }, [b3](double) { return b3; }}};
  }

  /// Milne-Pinney form  X = X_3 + Omega^2(t) X_1.
  static CoefficientSet milne_pinney(std::function<double(double)> omega2) {
    return {{std::move(omega2), [](double) { return 0.0; }, [](double) { return 1.0; }}};
  }

  std::array<double, 3> at(double t) const { return {b[0](t), b[1](t), b[2](t)}; }
};

/// (t, p) -> X(t, p) on a chart.
struct TimeDependentField {
  std::function<Point2(double, const Point2&)> rhs;
  Chart chart;

  Point2 operator()(double t, const Point2& p) const { return rhs(t, p); }
};

/// X_z(t, p) = sum_i b_i(t) X_{z,i}(p).
inline TimeDependentField assemble_system(const SL2Realization& r, const CoefficientSet& coeffs,
                                          const Tolerances& tol = default_tolerances()) {
  TimeDependentField f;
  f.chart = r.chart;
  f.rhs = [X = r.X, coeffs, chart = r.chart, margin = tol.domain_margin](double t, const Point2& p) {
    chart.require(p, margin);
    Point2 out{0.0, 0.0};
    for (std::size_t i = 0; i < 3; ++i) {
      const double bi = coeffs.b[i](t);
      if (bi == 0.0) continue;
      const Point2 xi = X[i](p);
      out.x += bi * xi.x;
      out.y += bi * xi.y;
    }
    return out;
  };
  return f;
}

/// Time-dependent Hamiltonian h_z(t, p) = sum_i b_i(t) h_{z,i}(p).
inline double hamiltonian_at(const SL2Realization& r, const CoefficientSet& coeffs, double t, const Point2& p,
                             const Tolerances& tol = default_tolerances()) {
  const auto hv = r.hamiltonians(p, tol);
  const auto b = coeffs.at(t);
  return b[0] * hv[0] + b[1] * hv[1] + b[2] * hv[2];
}

/// Left-minus-right residual of the second-order deformed Milne-Pinney
/// equation
///   x'' + (1/x - z x / th(z x^2)) x'^2 = -Omega^2 x shc(z x^2) + c z / (x th(z x^2)),
/// written with z x^2 / th(z x^2) = ch/shc so that z = 0 needs no limit.
inline double deformed_mp_second_order_residual(const SL2Realization& r, double omega2, double x, double xdot,
                                                double xddot, const Tolerances& tol = default_tolerances()) {
  if (r.family != Family::MP) throw DomainError("second-order residual applies to the MP family only");
  if (!(std::abs(x) > tol.domain_margin)) throw DomainError("second-order MP equation is singular at x = 0");
  const double w = r.z * x * x;
  const double s = shc(w);
  const double k = ch(w);
  const double lhs = xddot + (1.0 - k / s) / x * xdot * xdot;
  const double rhs = -omega2 * x * s + r.c * k / (x * x * x * s);
  return lhs - rhs;
}

/// Position-dependent mass profile of the deformed oscillator.
struct PDMProfile {
  double z = 0.0;

  /// m_z(x) = 1/shc(z x^2), evaluated without overflow for large z x^2.
  double mass(double x) const {
    const double w = std::abs(z * x * x);
    if (w < 1.0) return 1.0 / shc(w);
    const double e = std::exp(-w);
    return 2.0 * w * e / (1.0 - e * e);
  }

  /// U_osc(x) = x^2 shc(z x^2) = sh(z x^2)/z.
  double oscillator(double x) const { return x * x * shc(z * x * x); }

  /// U_RW(x) = 1/(x^2 shc^2(z x^2)); infinite at x = 0.
  double rosochatius(double x) const {
    const double m = mass(x);
    return m * m / (x * x);
  }
};

inline PDMProfile pdm_profile(double z) {
  if (!std::isfinite(z)) throw DomainError("deformation parameter must be finite");
  return PDMProfile{z};
}

struct PDMRow {
  double x;
  double z;
  double mass;
  double oscillator;
  double rosochatius;
};

/// Rows (x, z, m_z, U_osc, U_RW) on a uniform grid of `count` points.
inline std::vector<PDMRow> tabulate_pdm(const std::vector<double>& zs, double x_min, double x_max, int count) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max)) throw DomainError("grid bounds must be finite");
  if (count < 1) throw DomainError("grid needs at least one point");
  std::vector<PDMRow> rows;
  rows.reserve(zs.size() * static_cast<std::size_t>(count));
  for (double z : zs) {
    const PDMProfile prof = pdm_profile(z);
    for (int i = 0; i < count; ++i) {
      const double x = count == 1 ? x_min : x_min + (x_max - x_min) * i / (count - 1);
      rows.push_back({x, z, prof.mass(x), prof.oscillator(x), prof.rosochatius(x)});
    }
  }
  return rows;
}

}  // namespace lhdeform
