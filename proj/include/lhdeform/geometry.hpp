#pragma once

#include <cmath>
#include <string>

#include "lhdeform/errors.hpp"
#include "lhdeform/numkit/field.hpp"

namespace lhdeform {

/// Symplectic form  W(x, y) dx^dy  on a chart.
struct SymplecticDensity {
  ScalarField W;

  static SymplecticDensity canonical() { return {ScalarField::from([](const auto&, const auto&) { return 1.0; })}; }

  const Chart& chart() const { return W.chart(); }

  /// W(p), rejecting points where the form degenerates.
  double at(const Point2& p, const Tolerances& tol = default_tolerances()) const {
    chart().require(p, tol.domain_margin);
    const double w = W(p);
    if (!(std::abs(w) > tol.domain_margin))
      throw SingularFormError("symplectic density vanishes at (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) + ")");
    return w;
  }
};

/// a(x, y) d/dx + b(x, y) d/dy.
struct PlaneVectorField {
  ScalarField a;
  ScalarField b;
  Chart chart = Chart::plane();

  template <class F, class G>
  static PlaneVectorField from(F fa, G fb, Chart chart = Chart::plane()) {
    return {ScalarField::from(std::move(fa), chart), ScalarField::from(std::move(fb), chart), chart};
  }

  Point2 operator()(const Point2& p) const { return {a(p), b(p)}; }

  Point2 at(const Point2& p, const Tolerances& tol = default_tolerances()) const {
    chart.require(p, tol.domain_margin);
    return (*this)(p);
  }

  /// Component Jacobian  [[da/dx, da/dy], [db/dx, db/dy]].
  Mat2 jacobian(const Point2& p, const Tolerances& tol = default_tolerances()) const {
    chart.require(p, tol.domain_margin);
    const auto [av, ag] = value_and_gradient(a, p, tol);
    const auto [bv, bg] = value_and_gradient(b, p, tol);
    (void)av;
    (void)bv;
    return {{{ag.x, ag.y}, {bg.x, bg.y}}};
  }
};

inline PlaneVectorField operator*(double s, const PlaneVectorField& X) {
  auto scale = [s](const ScalarField& f) {
    return ScalarField::derived(f.level(), f.chart(), [f, s](const auto& x, const auto& y) { return s * f.eval(x, y); });
  };
  return {scale(X.a), scale(X.b), X.chart};
}

/// {f, g} = (f_x g_y - f_y g_x) / W at p. With W = 1 this gives
/// {x^2/2, -xy/2} = -x^2/2.
inline double poisson_bracket(const ScalarField& f, const ScalarField& g, const SymplecticDensity& W,
                              const Point2& p, const Tolerances& tol = default_tolerances()) {
  const double w = W.at(p, tol);
  const auto [fv, fg] = value_and_gradient(f, p, tol);
  const auto [gv, gg] = value_and_gradient(g, p, tol);
  (void)fv;
  (void)gv;
  return (fg.x * gg.y - fg.y * gg.x) / w;
}

/// Magnitude of the two products entering the bracket, used to scale
/// relative residuals when the bracket itself cancels to near zero.
inline double poisson_bracket_scale(const ScalarField& f, const ScalarField& g, const SymplecticDensity& W,
                                    const Point2& p, const Tolerances& tol = default_tolerances()) {
  const double w = W.at(p, tol);
  const auto [fv, fg] = value_and_gradient(f, p, tol);
  const auto [gv, gg] = value_and_gradient(g, p, tol);
  (void)fv;
  (void)gv;
  return (std::abs(fg.x * gg.y) + std::abs(fg.y * gg.x)) / std::abs(w);
}

/// The bracket {f, g} as a field of its own (one jet level shallower).
inline ScalarField bracket_field(const ScalarField& f, const ScalarField& g, const SymplecticDensity& W) {
  const int level = std::min({f.level(), g.level(), W.W.level() + 1}) - 1;
  const Chart chart = Chart::intersect(Chart::intersect(f.chart(), g.chart()), W.chart());
  return ScalarField::derived(level, chart, [f, g, W](const auto& x, const auto& y) {
    const auto fx = partial(f, 0, x, y), fy = partial(f, 1, x, y);
    const auto gx = partial(g, 0, x, y), gy = partial(g, 1, x, y);
    return (fx * gy - fy * gx) / W.W.eval(x, y);
  });
}

/// X_h with  iota_{X_h} omega = dh:  X_h = (h_y / W, -h_x / W).
inline PlaneVectorField hamiltonian_field(const ScalarField& h, const SymplecticDensity& W) {
  const int level = std::min(h.level(), W.W.level() + 1) - 1;
  const Chart chart = Chart::intersect(h.chart(), W.chart());
  auto a = ScalarField::derived(level, chart, [h, W](const auto& x, const auto& y) {
    return partial(h, 1, x, y) / W.W.eval(x, y);
  });
  auto b = ScalarField::derived(level, chart, [h, W](const auto& x, const auto& y) {
    return -partial(h, 0, x, y) / W.W.eval(x, y);
  });
  return {std::move(a), std::move(b), chart};
}

/// Directional derivative X(f) at p.
inline double directional_derivative(const ScalarField& f, const PlaneVectorField& X, const Point2& p,
                                     const Tolerances& tol = default_tolerances()) {
  const auto [fv, fg] = value_and_gradient(f, p, tol);
  (void)fv;
  const Point2 v = X.at(p, tol);
  return fg.x * v.x + fg.y * v.y;
}

/// [X, Y] = (X.grad) Y - (Y.grad) X at p.
inline Point2 commutator(const PlaneVectorField& X, const PlaneVectorField& Y, const Point2& p,
                         const Tolerances& tol = default_tolerances()) {
  const Point2 xv = X.at(p, tol);
  const Point2 yv = Y.at(p, tol);
  const Mat2 jx = X.jacobian(p, tol);
  const Mat2 jy = Y.jacobian(p, tol);
  return {jy[0][0] * xv.x + jy[0][1] * xv.y - (jx[0][0] * yv.x + jx[0][1] * yv.y),
          jy[1][0] * xv.x + jy[1][1] * xv.y - (jx[1][0] * yv.x + jx[1][1] * yv.y)};
}

/// Componentwise size of the two transport terms of the commutator.
inline Point2 commutator_scale(const PlaneVectorField& X, const PlaneVectorField& Y, const Point2& p,
                               const Tolerances& tol = default_tolerances()) {
  const Point2 xv = X.at(p, tol);
  const Point2 yv = Y.at(p, tol);
  const Mat2 jx = X.jacobian(p, tol);
  const Mat2 jy = Y.jacobian(p, tol);
  auto mag = [&](int k) {
    return std::abs(jy[k][0] * xv.x) + std::abs(jy[k][1] * xv.y) + std::abs(jx[k][0] * yv.x) +
           std::abs(jx[k][1] * yv.y);
  };
  return {mag(0), mag(1)};
}

/// Coefficient of L_X omega:  d/dx (W a) + d/dy (W b).  Zero iff X is
/// locally Hamiltonian. Evaluated in long double, since the two terms
/// cancel exactly for Hamiltonian fields.
inline double lie_derivative_omega(const PlaneVectorField& X, const SymplecticDensity& W, const Point2& p,
                                   const Tolerances& tol = default_tolerances()) {
  W.at(p, tol);
  X.chart.require(p, tol.domain_margin);
  const ExtJet0 x = p.x, y = p.y;
  const ExtJet1 wa = W.W.eval(ExtJet1(x, 1.0L), ExtJet1(y, 0.0L)) * X.a.eval(ExtJet1(x, 1.0L), ExtJet1(y, 0.0L));
  const ExtJet1 wb = W.W.eval(ExtJet1(x, 0.0L), ExtJet1(y, 1.0L)) * X.b.eval(ExtJet1(x, 0.0L), ExtJet1(y, 1.0L));
  return static_cast<double>(wa.d + wb.d);
}

/// Magnitude of the terms summed by lie_derivative_omega.
inline double lie_derivative_scale(const PlaneVectorField& X, const SymplecticDensity& W, const Point2& p,
                                   const Tolerances& tol = default_tolerances()) {
  W.at(p, tol);
  const Jet1 wa = W.W.eval(Jet1(p.x, 1.0), Jet1(p.y, 0.0)) * X.a.eval(Jet1(p.x, 1.0), Jet1(p.y, 0.0));
  const Jet1 wb = W.W.eval(Jet1(p.x, 0.0), Jet1(p.y, 1.0)) * X.b.eval(Jet1(p.x, 0.0), Jet1(p.y, 1.0));
  return std::abs(wa.d) + std::abs(wb.d);
}

/// |a - b| / max(|a|, |b|, scale, floor).
inline double relative_residual(double a, double b, double scale = 0.0, double floor = 1e-300) {
  const double den = std::max({std::abs(a), std::abs(b), std::abs(scale), floor});
  return std::abs(a - b) / den;
}

inline double relative_residual(const Point2& a, const Point2& b, double scale = 0.0, double floor = 1e-300) {
  const double den = std::max({norm(a), norm(b), std::abs(scale), floor});
  return norm(a - b) / den;
}

}  // namespace lhdeform
