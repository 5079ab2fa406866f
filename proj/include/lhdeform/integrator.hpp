#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lhdeform/coalgebra.hpp"
#include "lhdeform/errors.hpp"
#include "lhdeform/sl2systems.hpp"

namespace lhdeform {

template <std::size_t N>
using State = std::array<double, N>;

enum class Termination { completed, singular_approach, overflow };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::singular_approach: return "singular-approach";
    case Termination::overflow: return "overflow";
  }
  return "?";
}

template <std::size_t N>
struct BasicTrajectory {
  std::vector<double> t;
  std::vector<State<N>> y;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error_estimate = 0.0;
  Termination termination = Termination::completed;
  std::string message;

  std::size_t size() const { return t.size(); }
  bool completed() const { return termination == Termination::completed; }
};

template <std::size_t N>
class BasicIntegrationError : public Error {
 public:
  BasicIntegrationError(const std::string& what, BasicTrajectory<N> partial)
      : Error(what), partial_(std::move(partial)) {}
  const BasicTrajectory<N>& partial() const noexcept { return partial_; }

 private:
  BasicTrajectory<N> partial_;
};

struct IntegratorOptions {
  /// Output times; when empty, `samples` uniform times including both ends.
  std::vector<double> sample_times;
  int samples = 101;
  /// Halt when a state's chart margin drops below this value.
  double singular_guard = 1e-6;
  double initial_step = 0.0;  ///< 0 selects a step automatically
  std::size_t max_steps = 10'000'000;
};

template <std::size_t N>
struct OdeSystem {
  std::function<State<N>(double, const State<N>&)> rhs;
  /// Smallest chart margin across the state; +inf on unbounded charts.
  std::function<double(const State<N>&)> margin = [](const State<N>&) { return HUGE_VAL; };
};

namespace detail {

// Dormand-Prince 5(4) tableau with the order-4 continuous extension.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double scaled_rms(const State<N>& v, const State<N>& sk) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += (v[i] / sk[i]) * (v[i] / sk[i]);
  return std::sqrt(s / N);
}

inline std::vector<double> resolve_sample_times(double t0, double t1, const IntegratorOptions& opt) {
  std::vector<double> ts = opt.sample_times;
  if (ts.empty()) {
    const int n = std::max(opt.samples, 2);
    ts.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
    ts.back() = t1;
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= t0 && ts[i] <= t1)) throw DomainError("sample time outside the integration window");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw DomainError("sample times must be strictly increasing");
  }
  return ts;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration with proportional-integral
/// step control and order-4 dense output at the requested sample times.
///
/// Stops early (termination != completed) when the state comes within
/// `singular_guard` of the chart boundary or the right-hand side overflows;
/// throws BasicIntegrationError when the step size underflows.
template <std::size_t N>
BasicTrajectory<N> integrate_dopri5(const OdeSystem<N>& sys, const State<N>& y0, double t0, double t1, double rtol,
                                    double atol, const IntegratorOptions& opt = {}) {
  using K = detail::Dopri5;
  if (!(t1 > t0)) throw DomainError("integration window must satisfy t1 > t0");
  if (!(rtol > 0) || !(atol > 0)) throw DomainError("tolerances must be positive");
  if (!detail::all_finite(y0)) throw DomainError("initial state must be finite");
  if (!(sys.margin(y0) > opt.singular_guard)) throw DomainError("initial state too close to the chart boundary");

  const std::vector<double> ts = detail::resolve_sample_times(t0, t1, opt);
  const double span = t1 - t0;
  BasicTrajectory<N> traj;
  std::size_t next = 0;
  auto emit = [&](double t, const State<N>& y) {
    traj.t.push_back(t);
    traj.y.push_back(y);
  };
  if (ts.front() == t0) emit(ts[next++], y0);

  double t = t0;
  State<N> y = y0;
  State<N> k1, k2, k3, k4, k5, k6, k7;

  auto stop = [&](Termination why, const std::string& msg) {
    traj.termination = why;
    traj.message = msg;
    if (traj.t.empty() || traj.t.back() < t) emit(t, y);
  };

  try {
    k1 = sys.rhs(t, y);
  } catch (const RangeError& e) {
    stop(Termination::overflow, e.what());
    return traj;
  }

  auto sk_of = [&](const State<N>& a, const State<N>& b) {
    State<N> sk;
    for (std::size_t i = 0; i < N; ++i) sk[i] = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    return sk;
  };

  double h = opt.initial_step;
  if (!(h > 0)) {
    const State<N> sk = sk_of(y, y);
    const double d0 = detail::scaled_rms(y, sk);
    const double d1 = detail::scaled_rms(k1, sk);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    double h1;
    try {
      const State<N> y1 = detail::axpy<N>(y, h0, {{1.0, &k1}});
      const State<N> f1 = sys.rhs(t + h0, y1);
      State<N> diff;
      for (std::size_t i = 0; i < N; ++i) diff[i] = f1[i] - k1[i];
      const double d2 = detail::scaled_rms(diff, sk) / h0;
      const double dm = std::max(d1, d2);
      h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    } catch (const Error&) {
      h1 = h0;
    }
    h = std::min({100 * h0, h1, span});
  }

  const double h_min = 1e-14 * span;
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opt.max_steps)
      throw BasicIntegrationError<N>("maximum step count exceeded", traj);
    if (h < h_min) {
      stop(traj.termination, traj.message);
      throw BasicIntegrationError<N>("step size underflow at t = " + std::to_string(t) +
                                         " (stiffness or singularity)",
                                     traj);
    }
    bool final_step = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    State<N> y_new, err_vec;
    try {
      k2 = sys.rhs(t + K::c2 * h, detail::axpy<N>(y, h, {{K::a21, &k1}}));
      k3 = sys.rhs(t + K::c3 * h, detail::axpy<N>(y, h, {{K::a31, &k1}, {K::a32, &k2}}));
      k4 = sys.rhs(t + K::c4 * h, detail::axpy<N>(y, h, {{K::a41, &k1}, {K::a42, &k2}, {K::a43, &k3}}));
      k5 = sys.rhs(t + K::c5 * h,
                   detail::axpy<N>(y, h, {{K::a51, &k1}, {K::a52, &k2}, {K::a53, &k3}, {K::a54, &k4}}));
      k6 = sys.rhs(t + h, detail::axpy<N>(
                              y, h, {{K::a61, &k1}, {K::a62, &k2}, {K::a63, &k3}, {K::a64, &k4}, {K::a65, &k5}}));
      y_new = detail::axpy<N>(y, h, {{K::a71, &k1}, {K::a73, &k3}, {K::a74, &k4}, {K::a75, &k5}, {K::a76, &k6}});
      k7 = sys.rhs(t + h, y_new);
    } catch (const DomainError&) {
      // A stage left the chart: retry with a smaller step.
      ++traj.rejected;
      last_rejected = true;
      h *= 0.25;
      continue;
    } catch (const RangeError& e) {
      stop(Termination::overflow, e.what());
      return traj;
    }
    for (std::size_t i = 0; i < N; ++i)
      err_vec[i] = h * (K::e1 * k1[i] + K::e3 * k3[i] + K::e4 * k4[i] + K::e5 * k5[i] + K::e6 * k6[i] +
                        K::e7 * k7[i]);
    const double err = detail::scaled_rms(err_vec, sk_of(y, y_new));

    if (!std::isfinite(err) || !detail::all_finite(y_new)) {
      if (!detail::all_finite(y)) {
        stop(Termination::overflow, "non-finite state");
        return traj;
      }
      ++traj.rejected;
      last_rejected = true;
      h *= 0.2;
      continue;
    }

    if (err <= 1.0) {
      const double t_new = final_step ? t1 : t + h;
      // Dense output for samples inside (t, t_new].
      if (next < ts.size() && ts[next] <= t_new) {
        State<N> r2, r3, r4, r5;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = y_new[i] - y[i];
          const double bspl = h * k1[i] - dy;
          r2[i] = dy;
          r3[i] = bspl;
          r4[i] = dy - h * k7[i] - bspl;
          r5[i] = h * (K::d1 * k1[i] + K::d3 * k3[i] + K::d4 * k4[i] + K::d5 * k5[i] + K::d6 * k6[i] +
                       K::d7 * k7[i]);
        }
        while (next < ts.size() && ts[next] <= t_new) {
          if (ts[next] == t_new) {
            emit(ts[next], y_new);
          } else {
            const double th = (ts[next] - t) / h;
            const double th1 = 1.0 - th;
            State<N> yi;
            for (std::size_t i = 0; i < N; ++i)
              yi[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
            emit(ts[next], yi);
          }
          ++next;
        }
      }
      t = t_new;
      y = y_new;
      k1 = k7;
      ++traj.accepted;
      traj.max_error_estimate = std::max(traj.max_error_estimate, err);

      if (!(sys.margin(y) > opt.singular_guard)) {
        stop(Termination::singular_approach, "state reached the singular set at t = " + std::to_string(t));
        return traj;
      }

      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_old, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      err_old = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++traj.rejected;
      last_rejected = true;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return traj;
}

/// Classical fixed-step fourth-order Runge-Kutta. Returns every step.
template <std::size_t N>
BasicTrajectory<N> integrate_rk4(const OdeSystem<N>& sys, const State<N>& y0, double t0, double t1, std::size_t steps) {
  if (!(t1 > t0)) throw DomainError("integration window must satisfy t1 > t0");
  if (steps == 0) throw DomainError("RK4 needs at least one step");
  const double h = (t1 - t0) / static_cast<double>(steps);
  BasicTrajectory<N> traj;
  State<N> y = y0;
  traj.t.push_back(t0);
  traj.y.push_back(y);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + h * static_cast<double>(n);
    const State<N> k1 = sys.rhs(t, y);
    const State<N> k2 = sys.rhs(t + 0.5 * h, detail::axpy<N>(y, 0.5 * h, {{1.0, &k1}}));
    const State<N> k3 = sys.rhs(t + 0.5 * h, detail::axpy<N>(y, 0.5 * h, {{1.0, &k2}}));
    const State<N> k4 = sys.rhs(t + h, detail::axpy<N>(y, h, {{1.0, &k3}}));
    y = detail::axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
    traj.t.push_back(n + 1 == steps ? t1 : t + h);
    traj.y.push_back(y);
    ++traj.accepted;
  }
  return traj;
}

// Planar front end.

struct Sample {
  double t;
  Point2 p;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error_estimate = 0.0;
  Termination termination = Termination::completed;
  std::string message;

  bool completed() const { return termination == Termination::completed; }
};

using IntegrationError = BasicIntegrationError<2>;

inline Trajectory to_planar(const BasicTrajectory<2>& b) {
  Trajectory out;
  out.samples.reserve(b.t.size());
  for (std::size_t i = 0; i < b.t.size(); ++i) out.samples.push_back({b.t[i], {b.y[i][0], b.y[i][1]}});
  out.accepted = b.accepted;
  out.rejected = b.rejected;
  out.max_error_estimate = b.max_error_estimate;
  out.termination = b.termination;
  out.message = b.message;
  return out;
}

inline OdeSystem<2> planar_system(const TimeDependentField& f) {
  OdeSystem<2> sys;
  sys.rhs = [f](double t, const State<2>& y) {
    const Point2 v = f(t, {y[0], y[1]});
    return State<2>{v.x, v.y};
  };
  sys.margin = [chart = f.chart](const State<2>& y) { return chart.margin({y[0], y[1]}); };
  return sys;
}

/// Integrates an assembled planar system over [t0, t1].
inline Trajectory integrate(const TimeDependentField& system, const Point2& p0, double t0, double t1, double rtol,
                            double atol, const IntegratorOptions& opt = {}) {
  return to_planar(integrate_dopri5<2>(planar_system(system), {p0.x, p0.y}, t0, t1, rtol, atol, opt));
}

inline Trajectory integrate_fixed_rk4(const TimeDependentField& system, const Point2& p0, double t0, double t1,
                                      std::size_t steps) {
  return to_planar(integrate_rk4<2>(planar_system(system), {p0.x, p0.y}, t0, t1, steps));
}

/// Drift of a quantity along a trajectory.
struct DriftReport {
  std::string invariant;
  std::string flow;
  double initial = 0.0;
  double max_abs_deviation = 0.0;
  double relative_drift = 0.0;
  double tolerance = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  Termination termination = Termination::completed;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

inline void finish_drift(DriftReport& rep, double abs_floor) {
  rep.initial = rep.values.empty() ? 0.0 : rep.values.front();
  rep.max_abs_deviation = 0.0;
  for (double v : rep.values) rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(v - rep.initial));
  rep.relative_drift = rep.max_abs_deviation / std::max(std::abs(rep.initial), abs_floor);
}

/// How two copies move under one set of coefficients.
///
/// `coproduct` is the Hamiltonian flow of
///   h_z^(2)(t) = sum_i b_i(t) h_{z,i}^(2)
/// on the product plane, built from the deformed coproduct; F_z^(2)
/// Poisson-commutes with every h_{z,i}^(2) and is conserved by it.
/// `diagonal` moves each copy independently under X_z(t). The two agree at
/// z = 0; for z != 0 F_z^(2) is not conserved by the diagonal flow.
enum class TwoCopyFlow { coproduct, diagonal };

inline std::string to_string(TwoCopyFlow f) { return f == TwoCopyFlow::coproduct ? "coproduct" : "diagonal"; }

inline std::optional<TwoCopyFlow> parse_two_copy_flow(std::string_view s) {
  if (s == "coproduct") return TwoCopyFlow::coproduct;
  if (s == "diagonal") return TwoCopyFlow::diagonal;
  return std::nullopt;
}

/// Right-hand side on (p1, p2). For the coproduct flow, with
/// E1 = exp(-2z h1(p1)) and E2 = exp(2z h1(p2)) and j = 2, 3:
///   p1' += b_j (E2 X_j(p1) - 2z E1 h_j(p2) X_1(p1))
///   p2' += b_j (E1 X_j(p2) + 2z E2 h_j(p1) X_1(p2))
inline OdeSystem<4> two_copy_system(const SL2Realization& r, const CoefficientSet& coeffs, TwoCopyFlow flow,
                                    const Tolerances& tol = default_tolerances()) {
  OdeSystem<4> sys;
  if (flow == TwoCopyFlow::diagonal) {
    const TimeDependentField f = assemble_system(r, coeffs, tol);
    sys.rhs = [f](double t, const State<4>& y) {
      const Point2 a = f(t, {y[0], y[1]});
      const Point2 b = f(t, {y[2], y[3]});
      return State<4>{a.x, a.y, b.x, b.y};
    };
  } else {
    sys.rhs = [r, coeffs, margin = tol.domain_margin](double t, const State<4>& y) {
      const Point2 p1{y[0], y[1]}, p2{y[2], y[3]};
      r.chart.require(p1, margin);
      r.chart.require(p2, margin);
      const auto b = coeffs.at(t);
      const double a1 = -2.0 * r.z * r.h[0](p1);
      const double a2 = 2.0 * r.z * r.h[0](p2);
      detail::require_exp_range(a1);
      detail::require_exp_range(a2);
      const double e1 = std::exp(a1), e2 = std::exp(a2);
      const Point2 x1a = r.X[0](p1), x1b = r.X[0](p2);
      Point2 v1 = b[0] * x1a, v2 = b[0] * x1b;
      for (std::size_t j = 1; j < 3; ++j) {
        if (b[j] == 0.0) continue;
        v1 = v1 + b[j] * (e2 * r.X[j](p1) - 2.0 * r.z * e1 * r.h[j](p2) * x1a);
        v2 = v2 + b[j] * (e1 * r.X[j](p2) + 2.0 * r.z * e2 * r.h[j](p1) * x1b);
      }
      return State<4>{v1.x, v1.y, v2.x, v2.y};
    };
  }
  sys.margin = [chart = r.chart](const State<4>& y) {
    return std::min(chart.margin({y[0], y[1]}), chart.margin({y[2], y[3]}));
  };
  return sys;
}

/// Integrates both copies of `states` under the same coefficients and
/// records F_z^(2) at every sample.
inline DriftReport drift(const SL2Realization& r, const CoefficientSet& coeffs, const NCopyState& states, double t0,
                         double t1, double rtol, double atol, const IntegratorOptions& opt = {},
                         TwoCopyFlow flow = TwoCopyFlow::coproduct, const Tolerances& tol = default_tolerances()) {
  if (states.size() != 2) throw DomainError("drift needs a two-copy state");
  states.require_in(r.chart, tol);
  const OdeSystem<4> sys = two_copy_system(r, coeffs, flow, tol);
  const State<4> y0{states[0].x, states[0].y, states[1].x, states[1].y};
  const BasicTrajectory<4> traj = integrate_dopri5<4>(sys, y0, t0, t1, rtol, atol, opt);

  DriftReport rep;
  rep.invariant = "F_z^(2)";
  rep.flow = to_string(flow);
  rep.tolerance = rtol;
  rep.termination = traj.termination;
  rep.accepted = traj.accepted;
  rep.rejected = traj.rejected;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const auto& y = traj.y[i];
    rep.times.push_back(traj.t[i]);
    rep.values.push_back(f2_invariant(r, Point2{y[0], y[1]}, Point2{y[2], y[3]}));
  }
  finish_drift(rep, tol.abs_identity);
  return rep;
}

/// Drift of the one-copy Casimir F_z along a single trajectory.
inline DriftReport casimir_drift(const SL2Realization& r, const CoefficientSet& coeffs, const Point2& p0, double t0,
                                 double t1, double rtol, double atol, const IntegratorOptions& opt = {},
                                 const Tolerances& tol = default_tolerances()) {
  const Trajectory traj = integrate(assemble_system(r, coeffs, tol), p0, t0, t1, rtol, atol, opt);
  DriftReport rep;
  rep.invariant = "F_z";
  rep.flow = "single";
  rep.tolerance = rtol;
  rep.termination = traj.termination;
  rep.accepted = traj.accepted;
  rep.rejected = traj.rejected;
  for (const auto& s : traj.samples) {
    rep.times.push_back(s.t);
    rep.values.push_back(casimir_value(r, s.p, tol));
  }
  finish_drift(rep, tol.abs_identity);
  return rep;
}

}  // namespace lhdeform
