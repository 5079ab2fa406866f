#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lhdeform/integrator.hpp"
#include "oracles.hpp"

using namespace lhdeform;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TimeDependentField harmonic() {
  return assemble_system(build_realization(Family::MP, 0.0, 0.0),
                         CoefficientSet::milne_pinney([](double) { return 1.0; }));
}

double omega2(double t) { return 1.0 + 0.2 * std::cos(t); }

NCopyState copies() { return NCopyState{{Point2{1.0, 0.0}, Point2{2.0, 1.0}}}; }

}  // namespace

TEST(Dopri5, HarmonicOscillatorEndpoint) {
  const auto traj = integrate(harmonic(), {0.0, 1.0}, 0.0, kTwoPi, 1e-12, 1e-14);
  ASSERT_TRUE(traj.completed());
  const Point2 end = traj.samples.back().p;
  EXPECT_EQ(traj.samples.back().t, kTwoPi);
  EXPECT_LT(std::abs(end.x - 0.0), 1e-8);
  EXPECT_LT(std::abs(end.y - 1.0), 1e-8);
}

TEST(Dopri5, HarmonicOscillatorMatchesClosedFormEverywhere) {
  const auto traj = integrate(harmonic(), {0.0, 1.0}, 0.0, kTwoPi, 1e-12, 1e-14);
  ASSERT_EQ(traj.samples.size(), 101u);
  for (const auto& s : traj.samples) {
    EXPECT_NEAR(s.p.x, std::sin(s.t), 1e-9) << s.t;
    EXPECT_NEAR(s.p.y, std::cos(s.t), 1e-9) << s.t;
  }
}

TEST(Dopri5, DenseOutputAtRequestedTimes) {
  IntegratorOptions opt;
  opt.sample_times = {0.0, 0.123, 1.0, 2.5, 3.3333, 6.0};
  const auto traj = integrate(harmonic(), {0.0, 1.0}, 0.0, 6.0, 1e-11, 1e-13, opt);
  ASSERT_EQ(traj.samples.size(), opt.sample_times.size());
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    EXPECT_EQ(traj.samples[i].t, opt.sample_times[i]);
    EXPECT_NEAR(traj.samples[i].p.x, std::sin(opt.sample_times[i]), 1e-8);
  }
}

TEST(Dopri5, ConservesClassicalEnergy) {
  const double c = 1.0;
  const auto r = build_realization(Family::MP, 0.0, c);
  const auto traj = integrate(assemble_system(r, CoefficientSet::milne_pinney([](double) { return 1.0; })),
                              {1.0, 0.5}, 0.0, 20.0, 1e-11, 1e-13);
  ASSERT_TRUE(traj.completed());
  auto energy = [c](const Point2& p) { return 0.5 * (p.y * p.y + c / (p.x * p.x) + p.x * p.x); };
  const double e0 = energy(traj.samples.front().p);
  for (const auto& s : traj.samples) EXPECT_LT(oracle::rel(energy(s.p), e0), 1e-9) << s.t;
}

TEST(Dopri5, ErrorShrinksWithTolerance) {
  double prev = HUGE_VAL;
  for (double rtol : {1e-6, 1e-8, 1e-10}) {
    const auto traj = integrate(harmonic(), {0.0, 1.0}, 0.0, kTwoPi, rtol, rtol * 1e-2);
    const double err = std::hypot(traj.samples.back().p.x, traj.samples.back().p.y - 1.0);
    EXPECT_LT(err, prev);
    EXPECT_LT(err, 100 * rtol);
    prev = err;
  }
}

TEST(Rk4, AgreesWithAdaptive) {
  const auto r = build_realization(Family::MP, 0.3, 4.0);
  const auto f = assemble_system(r, CoefficientSet::milne_pinney(omega2));
  const double t1 = 5.0;
  const auto fixed = integrate_fixed_rk4(f, {1.0, 0.2}, 0.0, t1, 5000);
  IntegratorOptions opt;
  opt.sample_times = {t1};
  const auto adaptive = integrate(f, {1.0, 0.2}, 0.0, t1, 1e-12, 1e-14, opt);
  ASSERT_EQ(fixed.samples.back().t, t1);
  const Point2 a = fixed.samples.back().p, b = adaptive.samples.back().p;
  EXPECT_LT(oracle::rel(a.x, b.x), 1e-6);
  EXPECT_LT(oracle::rel(a.y, b.y), 1e-6);
}

TEST(Rk4, EmpiricalOrderIsFour) {
  auto endpoint_error = [](std::size_t steps) {
    const auto traj = integrate_fixed_rk4(harmonic(), {0.0, 1.0}, 0.0, 2.0, steps);
    const Point2 p = traj.samples.back().p;
    return std::hypot(p.x - std::sin(2.0), p.y - std::cos(2.0));
  };
  const double e1 = endpoint_error(50), e2 = endpoint_error(100);
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.8);
  EXPECT_LE(order, 4.2);
}

TEST(Rk4, Validation) {
  EXPECT_THROW(integrate_fixed_rk4(harmonic(), {0, 1}, 0.0, 1.0, 0), DomainError);
  EXPECT_THROW(integrate_fixed_rk4(harmonic(), {0, 1}, 1.0, 1.0, 10), DomainError);
}

TEST(Dopri5, InputValidation) {
  const auto f = harmonic();
  EXPECT_THROW(integrate(f, {0, 1}, 1.0, 0.0, 1e-8, 1e-10), DomainError);
  EXPECT_THROW(integrate(f, {0, 1}, 0.0, 1.0, 0.0, 1e-10), DomainError);
  EXPECT_THROW(integrate(f, {0, 1}, 0.0, 1.0, 1e-8, -1.0), DomainError);
  EXPECT_THROW(integrate(f, {NAN, 1}, 0.0, 1.0, 1e-8, 1e-10), DomainError);
  IntegratorOptions out_of_window;
  out_of_window.sample_times = {0.0, 2.0};
  EXPECT_THROW(integrate(f, {0, 1}, 0.0, 1.0, 1e-8, 1e-10, out_of_window), DomainError);
  IntegratorOptions unsorted;
  unsorted.sample_times = {0.5, 0.5};
  EXPECT_THROW(integrate(f, {0, 1}, 0.0, 1.0, 1e-8, 1e-10, unsorted), DomainError);
  const auto mp = assemble_system(build_realization(Family::MP, 0.1, 1.0), CoefficientSet::constant(1, 0, 1));
  EXPECT_THROW(integrate(mp, {1e-9, 1}, 0.0, 1.0, 1e-8, 1e-10), DomainError);
}

TEST(Dopri5, HaltsBeforeSingularSet) {
  // x' = -1 on the chart x > 0.
  OdeSystem<1> sys;
  sys.rhs = [](double, const State<1>& y) {
    if (!(y[0] > 0)) throw DomainError("off chart");
    return State<1>{-1.0};
  };
  sys.margin = [](const State<1>& y) { return y[0]; };
  IntegratorOptions opt;
  opt.singular_guard = 1e-3;
  const auto traj = integrate_dopri5<1>(sys, {1.0}, 0.0, 2.0, 1e-8, 1e-10, opt);
  EXPECT_EQ(traj.termination, Termination::singular_approach);
  EXPECT_FALSE(traj.completed());
  EXPECT_LE(traj.t.back(), 1.0);
  EXPECT_LE(std::abs(traj.y.back()[0]), 1e-3);
  EXPECT_NE(traj.message.find("singular"), std::string::npos);
  for (std::size_t i = 1; i < traj.t.size(); ++i) EXPECT_GT(traj.t[i], traj.t[i - 1]);
}

TEST(Dopri5, OverflowIsReported) {
  // y' = y^2 blows up at t = 1.
  OdeSystem<1> sys;
  sys.rhs = [](double, const State<1>& y) {
    if (std::abs(y[0]) > 1e6) throw RangeError("state too large");
    return State<1>{y[0] * y[0]};
  };
  const auto traj = integrate_dopri5<1>(sys, {1.0}, 0.0, 2.0, 1e-8, 1e-10);
  EXPECT_EQ(traj.termination, Termination::overflow);
  EXPECT_LT(traj.t.back(), 1.0);
  EXPECT_GT(traj.t.back(), 0.99);
}

TEST(Dopri5, StepUnderflowCarriesPartialTrajectory) {
  // Every stage beyond t = 0.5 is rejected.
  OdeSystem<1> sys;
  sys.rhs = [](double t, const State<1>&) {
    if (t > 0.5) throw DomainError("wall");
    return State<1>{1.0};
  };
  try {
    integrate_dopri5<1>(sys, {0.0}, 0.0, 1.0, 1e-8, 1e-10);
    FAIL() << "expected IntegrationError";
  } catch (const BasicIntegrationError<1>& e) {
    EXPECT_NE(std::string(e.what()).find("underflow"), std::string::npos);
    ASSERT_FALSE(e.partial().t.empty());
    EXPECT_NEAR(e.partial().t.back(), 0.5, 1e-6);
    EXPECT_NEAR(e.partial().y.back()[0], e.partial().t.back(), 1e-12);
  }
}

TEST(Dopri5, MaxStepsIsEnforced) {
  IntegratorOptions opt;
  opt.max_steps = 5;
  EXPECT_THROW(integrate(harmonic(), {0, 1}, 0.0, 100.0, 1e-12, 1e-14, opt), IntegrationError);
}

TEST(Dopri5, TimeReversalReturnsToStart) {
  const double rtol = 1e-10, t1 = 8.0;
  const auto r = build_realization(Family::MP, 0.3, 4.0);
  const auto f = assemble_system(r, CoefficientSet::milne_pinney(omega2));
  const Point2 p0{1.0, 0.2};
  const auto fwd = integrate(f, p0, 0.0, t1, rtol, rtol * 1e-2);
  ASSERT_TRUE(fwd.completed());
  TimeDependentField back = f;
  back.rhs = [f, t1](double s, const Point2& p) { return -1.0 * f(t1 - s, p); };
  const auto rev = integrate(back, fwd.samples.back().p, 0.0, t1, rtol, rtol * 1e-2);
  ASSERT_TRUE(rev.completed());
  const Point2 q = rev.samples.back().p;
  EXPECT_LT(std::hypot(q.x - p0.x, q.y - p0.y) / std::hypot(p0.x, p0.y), 10 * rtol);
}

TEST(Drift, CoproductFlowConservesTwoCopyInvariant) {
  for (double z : {0.0, 0.3, 0.5}) {
    const auto r = build_realization(Family::MP, z, 4.0);
    const auto rep = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 10.0, 1e-10, 1e-12);
    EXPECT_EQ(rep.termination, Termination::completed);
    EXPECT_EQ(rep.flow, "coproduct");
    EXPECT_EQ(rep.times.size(), 101u);
    EXPECT_LT(rep.relative_drift, 1e-6) << "z = " << z;
  }
}

TEST(Drift, ShrinksWithTolerance) {
  const auto r = build_realization(Family::MP, 0.3, 4.0);
  const auto coarse = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 10.0, 1e-8, 1e-10);
  const auto fine = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 10.0, 1e-9, 1e-11);
  EXPECT_GE(coarse.relative_drift / fine.relative_drift, 5.0)
      << coarse.relative_drift << " vs " << fine.relative_drift;
}

TEST(Drift, FlowsAgreeWhenUndeformed) {
  const auto r = build_realization(Family::MP, 0.0, 4.0);
  const auto a = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 5.0, 1e-11, 1e-13, {},
                       TwoCopyFlow::coproduct);
  const auto b = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 5.0, 1e-11, 1e-13, {},
                       TwoCopyFlow::diagonal);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_LT(oracle::rel(a.values[i], b.values[i]), 1e-8);
}

TEST(Drift, DiagonalFlowBreaksDeformedInvariant) {
  const auto r = build_realization(Family::MP, 0.3, 4.0);
  const auto rep = drift(r, CoefficientSet::milne_pinney(omega2), copies(), 0.0, 10.0, 1e-10, 1e-12, {},
                         TwoCopyFlow::diagonal);
  EXPECT_EQ(rep.flow, "diagonal");
  EXPECT_GT(rep.relative_drift, 1e-3);
}

TEST(Drift, CoproductFlowOnRiccatiFamilies) {
  const auto cr = build_realization(Family::CR, 0.2);
  const auto rep = drift(cr, CoefficientSet::constant(0.3, 0.1, 0.5),
                         NCopyState{{Point2{0.2, 1.0}, Point2{-0.4, 0.8}}}, 0.0, 3.0, 1e-10, 1e-12);
  EXPECT_EQ(rep.termination, Termination::completed);
  EXPECT_LT(rep.relative_drift, 1e-6);
}

TEST(Drift, NeedsTwoCopies) {
  const auto r = build_realization(Family::MP, 0.3, 4.0);
  EXPECT_THROW(drift(r, CoefficientSet::milne_pinney(omega2), NCopyState{{Point2{1.0, 0.0}}}, 0, 1, 1e-8, 1e-10),
               DomainError);
}

TEST(Drift, OneCopyCasimir) {
  for (double z : {0.0, 0.3, -0.5}) {
    const auto r = build_realization(Family::MP, z, 4.0);
    const auto rep = casimir_drift(r, CoefficientSet::milne_pinney(omega2), {1.0, 0.2}, 0.0, 10.0, 1e-12, 1e-14);
    EXPECT_EQ(rep.termination, Termination::completed);
    EXPECT_EQ(rep.initial, rep.values.front());
    EXPECT_LT(rep.relative_drift, 1e-12) << "z = " << z;
  }
}

TEST(Termination, Names) {
  EXPECT_EQ(to_string(Termination::completed), "completed");
  EXPECT_EQ(to_string(Termination::singular_approach), "singular-approach");
  EXPECT_EQ(to_string(Termination::overflow), "overflow");
  EXPECT_EQ(parse_two_copy_flow("diagonal"), TwoCopyFlow::diagonal);
  EXPECT_EQ(parse_two_copy_flow("coproduct"), TwoCopyFlow::coproduct);
  EXPECT_FALSE(parse_two_copy_flow("other").has_value());
}
