#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lhdeform/errors.hpp"
#include "lhdeform/geometry.hpp"
#include "lhdeform/integrator.hpp"
#include "lhdeform/numkit/special.hpp"
#include "lhdeform/transforms.hpp"

namespace lhdeform::appendix {

/// t x'' + 2 x' - eta^2 t x = 0 with general solution
/// x(t) = A shc(eta t) + B ch(eta t) / t.
struct ShcODEParams {
  double eta = 1.0;
  double A = 1.0;
  double B = 0.0;

  void validate() const {
    if (!(eta != 0) || !std::isfinite(eta)) throw DomainError("eta must be finite and nonzero");
    if (!std::isfinite(A) || !std::isfinite(B)) throw DomainError("A and B must be finite");
  }

  template <class T>
  T solution(const T& t) const {
    const T s = A * shc(eta * t);
    if (B == 0.0) return s;
    return s + B * ch(eta * t) / t;
  }
};

/// t x'' + 2 x' + lambda^2 t x = 0 with x(t) = A sinc(lambda t) + B cos(lambda t) / t.
struct SincODEParams {
  double lambda = 1.0;
  double A = 1.0;
  double B = 0.0;

  void validate() const {
    if (!(lambda != 0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and nonzero");
    if (!std::isfinite(A) || !std::isfinite(B)) throw DomainError("A and B must be finite");
  }

  template <class T>
  T solution(const T& t) const {
    using std::cos;
    const T s = A * sinc(lambda * t);
    if (B == 0.0) return s;
    return s + B * cos(lambda * t) / t;
  }
};

namespace detail {

template <class P>
std::array<double, 3> jet_of_solution(const P& params, double t) {
  if (params.B != 0.0 && t == 0.0) throw DomainError("closed-form solution is singular at t = 0 when B != 0");
  const Jet2 tt(Jet1(t, 1.0), Jet1(1.0, 0.0));
  const Jet2 x = params.solution(tt);
  return {x.v.v, x.v.d, x.d.d};
}

}  // namespace detail

/// t x'' + 2 x' - eta^2 t x for the closed-form solution.
inline double shc_ode_residual(const ShcODEParams& params, double t) {
  params.validate();
  const auto [x, xd, xdd] = detail::jet_of_solution(params, t);
  return t * xdd + 2.0 * xd - params.eta * params.eta * t * x;
}

/// t x'' + 2 x' + lambda^2 t x for the closed-form solution.
inline double sinc_ode_residual(const SincODEParams& params, double t) {
  params.validate();
  const auto [x, xd, xdd] = detail::jet_of_solution(params, t);
  return t * xdd + 2.0 * xd + params.lambda * params.lambda * t * x;
}

struct FitReport {
  double A = 0.0;  ///< fitted coefficients from the initial data
  double B = 0.0;
  double scaled_det = 0.0;  ///< determinant of the row-scaled fit matrix
  double max_deviation = 0.0;
  std::size_t samples = 0;
  Termination termination = Termination::completed;
};

/// Row-scaled 2x2 fit matrix [[shc(eta t0), ch(eta t0)/t0], [d/dt ..., d/dt ...]].
inline Mat2 fit_matrix(double eta, double t0) {
  if (!(t0 > 0)) throw DomainError("fit needs t0 > 0");
  const ShcODEParams first{eta, 1.0, 0.0};
  const ShcODEParams second{eta, 0.0, 1.0};
  const auto f = detail::jet_of_solution(first, t0);
  const auto g = detail::jet_of_solution(second, t0);
  Mat2 m{{{f[0], g[0]}, {f[1], g[1]}}};
  for (auto& row : m) {
    const double s = std::max(std::abs(row[0]), std::abs(row[1]));
    if (s > 0) {
      row[0] /= s;
      row[1] /= s;
    }
  }
  return m;
}

/// Determinant of fit_matrix from the Wronskian f g' - g f' = -1/t0^2.
inline double fit_determinant(double eta, double t0) {
  if (!(t0 > 0)) throw DomainError("fit needs t0 > 0");
  const auto f = detail::jet_of_solution(ShcODEParams{eta, 1.0, 0.0}, t0);
  const auto g = detail::jet_of_solution(ShcODEParams{eta, 0.0, 1.0}, t0);
  const double s0 = std::max(std::abs(f[0]), std::abs(g[0]));
  const double s1 = std::max(std::abs(f[1]), std::abs(g[1]));
  return -1.0 / (t0 * t0 * s0 * s1);
}

/// Integrates x' = y, y' = -(2/t) y + eta^2 x from (x0, xd0) at t0, fits
/// (A, B) to the initial data, and reports the largest deviation of the
/// numerical x from the fitted closed form on [t0, t1].
inline FitReport shc_ode_integrate_and_fit(double eta, double t0, double x0, double xd0, double t1,
                                           double rtol = 1e-12, double atol = 1e-12, int samples = 201) {
  ShcODEParams{eta, 0.0, 0.0}.validate();
  if (!(t0 > 0)) throw DomainError("integrate-and-fit needs t0 > 0");
  if (!(t1 > t0)) throw DomainError("integrate-and-fit needs t1 > t0");

  const ShcODEParams first{eta, 1.0, 0.0};
  const ShcODEParams second{eta, 0.0, 1.0};
  const auto f = detail::jet_of_solution(first, t0);
  const auto g = detail::jet_of_solution(second, t0);
  const double s0 = std::max(std::abs(f[0]), std::abs(g[0]));
  const double s1 = std::max(std::abs(f[1]), std::abs(g[1]));
  const double m00 = f[0] / s0, m01 = g[0] / s0, r0 = x0 / s0;
  const double m10 = f[1] / s1, m11 = g[1] / s1, r1 = xd0 / s1;
  FitReport rep;
  rep.scaled_det = fit_determinant(eta, t0);
  if (!(std::abs(rep.scaled_det) > 1e-14)) throw SingularFormError("fit matrix is singular");
  rep.A = (r0 * m11 - m01 * r1) / rep.scaled_det;
  rep.B = (m00 * r1 - r0 * m10) / rep.scaled_det;

  OdeSystem<2> sys;
  sys.rhs = [eta](double t, const State<2>& y) { return State<2>{y[1], -2.0 / t * y[1] + eta * eta * y[0]}; };
  IntegratorOptions opt;
  opt.samples = samples;
  const BasicTrajectory<2> traj = integrate_dopri5<2>(sys, {x0, xd0}, t0, t1, rtol, atol, opt);
  rep.termination = traj.termination;
  rep.samples = traj.size();
  const ShcODEParams fitted{eta, rep.A, rep.B};
  for (std::size_t i = 0; i < traj.size(); ++i)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(traj.y[i][0] - fitted.solution(traj.t[i])));
  return rep;
}

/// Same, with the initial data taken from the closed form for `params`.
inline FitReport shc_ode_integrate_and_fit(const ShcODEParams& params, double t0, double t1, double rtol = 1e-12,
                                           double atol = 1e-12, int samples = 201) {
  params.validate();
  if (!(t0 > 0)) throw DomainError("integrate-and-fit needs t0 > 0");
  const auto j = detail::jet_of_solution(params, t0);
  return shc_ode_integrate_and_fit(params.eta, t0, j[0], j[1], t1, rtol, atol, samples);
}

// gl(2) Lie system X = -(2/t) X1 + X2 + eta^2 X3 on x != 0.

inline Chart gl2_chart() {
  Chart c;
  c.name = "x!=0";
  c.margin = [](const Point2& p) { return std::abs(p.x); };
  return c;
}

/// X1 = y d/dy, X2 = y d/dx, X3 = x d/dy, X4 = x d/dx + y d/dy.
inline std::array<PlaneVectorField, 4> gl2_fields() {
  const Chart c = gl2_chart();
  auto zero = [](const auto&, const auto&) { return 0.0; };
  auto xs = [](const auto& x, const auto&) { return x; };
  auto ys = [](const auto&, const auto& y) { return y; };
  return {PlaneVectorField::from(zero, ys, c), PlaneVectorField::from(ys, zero, c),
          PlaneVectorField::from(zero, xs, c), PlaneVectorField::from(xs, ys, c)};
}

/// The same algebra in the I7 chart u = y/x, v = 1/x:
/// X1 = u d/du, X2 = -u^2 d/du - u v d/dv, X3 = d/du, X4 = -v d/dv.
inline std::array<PlaneVectorField, 4> i7_fields() {
  Chart c;
  c.name = "v!=0";
  c.margin = [](const Point2& q) { return std::abs(q.y); };
  auto zero = [](const auto&, const auto&) { return 0.0; };
  auto one = [](const auto&, const auto&) { return 1.0; };
  return {PlaneVectorField::from([](const auto& u, const auto&) { return u; }, zero, c),
          PlaneVectorField::from([](const auto& u, const auto&) { return -1.0 * u * u; },
                                 [](const auto& u, const auto& v) { return -1.0 * u * v; }, c),
          PlaneVectorField::from(one, zero, c),
          PlaneVectorField::from(zero, [](const auto&, const auto& v) { return -1.0 * v; }, c)};
}

inline PointMap i7_map() {
  return PointMap::from("gl2->I7", gl2_chart(), [](const auto& p) {
    using T = std::decay_t<decltype(p.x)>;
    return Vec2<T>{p.y / p.x, 1.0 / p.x};
  });
}

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct Gl2Report {
  Point2 point;
  std::vector<IdentityCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.residual);
    return m;
  }
};

/// Checks the gl(2) commutation table and the I7 pushforwards at p
/// against absolute tolerance `tol_abs`.
inline Gl2Report gl2_commutator_check(const Point2& p, double tol_abs = 1e-10,
                                      const Tolerances& tol = default_tolerances()) {
  gl2_chart().require(p, tol.domain_margin);
  const auto X = gl2_fields();
  const auto Y = i7_fields();
  const PointMap m = i7_map();
  Gl2Report rep;
  rep.point = p;
  auto add = [&](std::string name, double r) { rep.checks.push_back({std::move(name), r, r <= tol_abs}); };
  auto field = [&](int i) { return X[static_cast<std::size_t>(i)].at(p, tol); };

  add("[X1,X2]=X2", norm(commutator(X[0], X[1], p, tol) - field(1)));
  add("[X1,X3]=-X3", norm(commutator(X[0], X[2], p, tol) + field(2)));
  add("[X2,X3]=2X1-X4", norm(commutator(X[1], X[2], p, tol) - (2.0 * field(0) - field(3))));
  for (int i = 0; i < 3; ++i)
    add("[X4,X" + std::to_string(i + 1) + "]=0", norm(commutator(X[3], X[static_cast<std::size_t>(i)], p, tol)));
  for (int i = 0; i < 4; ++i)
    add("I7 pushforward X" + std::to_string(i + 1),
        pushforward_check(m, X[static_cast<std::size_t>(i)], Y[static_cast<std::size_t>(i)], p, tol));
  return rep;
}

}  // namespace lhdeform::appendix
