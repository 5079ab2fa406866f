#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lhdeform/appendixlab.hpp"
#include "lhdeform/cli/config.hpp"
#include "lhdeform/coalgebra.hpp"
#include "lhdeform/integrator.hpp"
#include "lhdeform/transforms.hpp"
#include "lhdeform/verify.hpp"

namespace lhdeform::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kPartialRun = 3 };

/// `%.12g` CSV rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
  }

  void row(std::initializer_list<double> vals) {
    bool first = true;
    char buf[40];
    for (double v : vals) {
      if (!first) os_ << ',';
      std::snprintf(buf, sizeof buf, "%.12g", v);
      os_ << buf;
      first = false;
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

namespace detail {

inline Json header(const char* command, const RunConfig& c) {
  Json j;
  j["schema"] = std::string("lhdeform.") + command;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  return j;
}

inline Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

inline Json system_json(const RunConfig& c) {
  return Json{{"family", to_string(c.family)},
              {"z", c.z},
              {"c", build_realization(c.family, c.z, c.c).c},
              {"b", Json::array({c.b[0], c.b[1], c.b[2]})},
              {"t_span", Json::array({c.t0, c.t1})},
              {"rtol", c.rtol},
              {"atol", c.atol}};
}

inline IntegratorOptions options(const RunConfig& c) {
  IntegratorOptions opt;
  opt.samples = c.samples;
  return opt;
}

inline void flip_h2(SL2Realization& r) {
  const ScalarField good = r.h[1];
  r.h[1] = ScalarField::derived(good.level(), good.chart(),
                                [good](const auto& x, const auto& y) { return -1.0 * good.eval(x, y); });
}

inline Json result_json(const IdentityResult& r) {
  return Json{{"suite", r.suite},         {"identity", r.identity},
              {"measure", r.measure},     {"samples", r.samples},
              {"max_residual", r.max_residual}, {"tolerance", r.tolerance},
              {"worst_point", point_json(r.worst_point)}, {"pass", r.pass}};
}

}  // namespace detail

/// Identity suites over the configured (family, z, c) grid. Exit 0 iff
/// every identity passes.
inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SuiteThresholds th;
  Json rep = detail::header("verify", c);
  rep["tolerances"] = {{"bracket_rel", th.bracket_rel},       {"casimir_abs", th.casimir_abs},
                       {"commutator_rel", th.commutator_rel}, {"hamiltonian_rel", th.hamiltonian_rel},
                       {"lie_abs", th.lie_abs},               {"classical_rel", th.classical_rel}};
  rep["points_per_suite"] = c.points;
  const SamplingBox box;
  Json sampling = Json::object();
  for (Family f : c.families) sampling[to_string(f)] = box.describe(f);
  rep["sampling"] = sampling;
  if (!c.inject_fault.empty()) rep["injected_fault"] = c.inject_fault;

  Json configs = Json::array();
  std::size_t total = 0, failed = 0;
  double worst = 0.0;
  std::vector<std::vector<std::string>> csv_rows;
  std::uint64_t k = 0;
  for (Family f : c.families) {
    const std::vector<double> cs = f == Family::MP ? c.cs : std::vector<double>{0.0};
    for (double cc : cs) {
      for (double z : c.zs) {
        SL2Realization r = build_realization(f, z, cc);
        if (c.inject_fault == "h2") detail::flip_h2(r);
        const std::uint64_t id = k++;
        auto pts = [&](std::uint64_t suite) {
          return PointSampler(f, derive_seed(c.seed, id, suite)).take(static_cast<std::size_t>(c.points));
        };
        std::vector<IdentityResult> results;
        auto append = [&](std::vector<IdentityResult> rs) { results.insert(results.end(), rs.begin(), rs.end()); };
        append(bracket_suite(r, pts(1), th));
        append(casimir_suite(r, pts(2), th));
        append(commutator_suite(r, pts(3), th));
        const auto shared = pts(4);
        append(hamiltonian_suite(r, shared, th));
        append(lie_derivative_suite(r, shared, th));
        if (z == 0.0) append(classical_limit_suite(f, r.c, pts(5), th));

        Json item{{"family", to_string(f)}, {"z", z}, {"c", r.c}, {"results", Json::array()}};
        for (const auto& res : results) {
          ++total;
          if (!res.pass) ++failed;
          worst = std::max(worst, res.max_residual);
          item["results"].push_back(detail::result_json(res));
          if (!res.pass)
            err << "FAIL " << to_string(f) << " z=" << z << " c=" << r.c << ": " << res.identity << " residual "
                << res.max_residual << " > " << res.tolerance << '\n';
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.12g", res.max_residual);
          char tb[32];
          std::snprintf(tb, sizeof tb, "%.12g", res.tolerance);
          char zb[32], cb[32];
          std::snprintf(zb, sizeof zb, "%.12g", z);
          std::snprintf(cb, sizeof cb, "%.12g", r.c);
          csv_rows.push_back({to_string(f), zb, cb, res.suite, res.identity, res.measure,
                              std::to_string(res.samples), buf, tb, res.pass ? "1" : "0"});
        }
        configs.push_back(std::move(item));
      }
    }
  }
  rep["configurations"] = std::move(configs);
  rep["summary"] = {{"identities", total}, {"failed", failed}, {"max_residual", worst}, {"pass", failed == 0}};

  if (c.format.value_or(Format::json) == Format::json) {
    out << rep.dump(2) << '\n';
  } else {
    out << "family,z,c,suite,identity,measure,samples,max_residual,tolerance,pass\n";
    for (const auto& row : csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        const bool quote = row[i].find_first_of(",\"") != std::string::npos;
        if (quote) {
          out << '"';
          for (char ch : row[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
          out << '"';
        } else {
          out << row[i];
        }
      }
      out << '\n';
    }
  }
  return failed == 0 ? kOk : kCheckFailed;
}

/// One trajectory from the first configured state: t, x, y, h_z(t), F_z.
inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SL2Realization r = build_realization(c.family, c.z, c.c);
  const CoefficientSet coeffs = c.coefficients();
  const Point2 p0 = c.states.front();
  Trajectory traj;
  std::string failure;
  try {
    traj = integrate(assemble_system(r, coeffs), p0, c.t0, c.t1, c.rtol, c.atol, detail::options(c));
  } catch (const IntegrationError& e) {
    traj = to_planar(e.partial());
    failure = e.what();
  } catch (const Error& e) {
    failure = e.what();
  }
  if (failure.empty() && !traj.completed()) failure = to_string(traj.termination) + ": " + traj.message;

  struct Row {
    double t, x, y, h, f;
  };
  std::vector<Row> rows;
  for (const auto& s : traj.samples) {
    double h = NAN, f = NAN;
    try {
      h = hamiltonian_at(r, coeffs, s.t, s.p);
      f = casimir_value(r, s.p);
    } catch (const Error&) {
    }
    rows.push_back({s.t, s.p.x, s.p.y, h, f});
  }

  if (c.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w(out);
    w.header({"t", "x", "y", "h_z", "F_z"});
    for (const auto& row : rows) w.row({row.t, row.x, row.y, row.h, row.f});
  } else {
    Json rep = detail::header("simulate", c);
    rep["system"] = detail::system_json(c);
    rep["initial_state"] = detail::point_json(p0);
    rep["complete"] = failure.empty();
    if (!failure.empty()) rep["failure"] = failure;
    rep["accepted_steps"] = traj.accepted;
    rep["rejected_steps"] = traj.rejected;
    Json samples = Json::array();
    for (const auto& row : rows) samples.push_back({{"t", row.t}, {"x", row.x}, {"y", row.y}, {"h_z", row.h}, {"F_z", row.f}});
    rep["samples"] = std::move(samples);
    out << rep.dump(2) << '\n';
  }
  if (!failure.empty()) {
    err << "partial trajectory (" << rows.size() << " samples): " << failure << '\n';
    return kPartialRun;
  }
  return kOk;
}

/// Two-copy F_z^(2) along the configured flow. CSV rows t, F2 go to `out`;
/// the summary JSON goes to `summary` (JSON format: one document on `out`).
inline int cmd_drift(const RunConfig& c, std::ostream& out, std::ostream& summary, std::ostream& err) {
  if (c.states.size() != 2) {
    err << "drift needs exactly two copies in 'state'\n";
    return kConfigError;
  }
  const SL2Realization r = build_realization(c.family, c.z, c.c);
  DriftReport rep;
  std::string failure;
  try {
    rep = drift(r, c.coefficients(), NCopyState{c.states}, c.t0, c.t1, c.rtol, c.atol, detail::options(c), c.flow);
  } catch (const BasicIntegrationError<4>& e) {
    failure = e.what();
    const auto& part = e.partial();
    for (std::size_t i = 0; i < part.size(); ++i) {
      rep.times.push_back(part.t[i]);
      rep.values.push_back(f2_invariant(r, Point2{part.y[i][0], part.y[i][1]}, Point2{part.y[i][2], part.y[i][3]}));
    }
    rep.flow = to_string(c.flow);
    finish_drift(rep, default_tolerances().abs_identity);
  } catch (const Error& e) {
    failure = e.what();
  }
  if (failure.empty() && rep.termination != Termination::completed) failure = to_string(rep.termination);
  const bool within = rep.relative_drift < c.drift_tol;

  Json s = detail::header("drift", c);
  s["system"] = detail::system_json(c);
  s["flow"] = to_string(c.flow);
  s["copies"] = Json::array({detail::point_json(c.states[0]), detail::point_json(c.states[1])});
  s["invariant"] = "F_z^(2)";
  s["initial"] = rep.values.empty() ? Json(nullptr) : Json(rep.initial);
  s["max_abs_deviation"] = rep.max_abs_deviation;
  s["relative_drift"] = rep.relative_drift;
  s["drift_tolerance"] = c.drift_tol;
  s["within_tolerance"] = within;
  s["complete"] = failure.empty();
  if (!failure.empty()) s["failure"] = failure;
  s["accepted_steps"] = rep.accepted;
  s["rejected_steps"] = rep.rejected;

  if (c.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w(out);
    w.header({"t", "F2"});
    for (std::size_t i = 0; i < rep.times.size(); ++i) w.row({rep.times[i], rep.values[i]});
    summary << s.dump(2) << '\n';
  } else {
    Json series = Json::array();
    for (std::size_t i = 0; i < rep.times.size(); ++i) series.push_back({{"t", rep.times[i]}, {"F2", rep.values[i]}});
    s["series"] = std::move(series);
    out << s.dump(2) << '\n';
  }
  if (!failure.empty()) {
    err << "partial run: " << failure << '\n';
    return kPartialRun;
  }
  return within ? kOk : kCheckFailed;
}

/// Maps one point between a Riccati plane and the MP plane.
inline int cmd_map(const RunConfig& c, std::ostream& out, std::ostream& err) {
  int side = 0;
  if (c.side) {
    side = *c.side;
  } else if (!c.inverse) {
    const auto s = infer_side(c.map_family, c.point);
    if (!s) {
      err << "point lies on the singular set of the " << to_string(c.map_family) << " chart\n";
      return kCheckFailed;
    }
    side = *s;
  } else {
    side = 1;
  }
  const ChartMap m = make_chart_map(c.map_family, c.branch, side);
  Point2 image;
  try {
    image = c.inverse ? unmap_point(m, c.point) : map_point(m, c.point);
  } catch (const Error& e) {
    err << "map failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  const Point2 riccati = c.inverse ? image : c.point;
  const Point2 mp = c.inverse ? c.point : image;
  if (c.format.value_or(Format::json) == Format::json) {
    Json j = detail::header("map", c);
    j["riccati_family"] = to_string(c.map_family);
    j["direction"] = c.inverse ? "inverse" : "forward";
    j["branch"] = to_string(c.branch);
    j["side"] = side;
    j["c"] = m.c;
    j["riccati_point"] = detail::point_json(riccati);
    j["mp_point"] = detail::point_json(mp);
    j["multiplicative_constant"] = m.multiplicative_constant();
    j["z"] = c.z;
    j["partner_z"] = m.partner_z(c.z);
    out << j.dump(2) << '\n';
  } else {
    CsvWriter w(out);
    w.header({"u", "v", "x", "y"});
    w.row({riccati.x, riccati.y, mp.x, mp.y});
  }
  return kOk;
}

/// Position-dependent mass tables: x, z, m_z(x), U_osc(x), U_RW(x).
inline int cmd_pdm(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto rows = tabulate_pdm(c.pdm_zs, c.x_min, c.x_max, c.count);
  if (c.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w(out);
    w.header({"x", "z", "m_z", "U_osc", "U_rw"});
    for (const auto& r : rows) w.row({r.x, r.z, r.mass, r.oscillator, r.rosochatius});
  } else {
    Json j = detail::header("pdm", c);
    Json arr = Json::array();
    for (const auto& r : rows)
      arr.push_back({{"x", r.x}, {"z", r.z}, {"m_z", r.mass}, {"U_osc", r.oscillator}, {"U_rw", r.rosochatius}});
    j["rows"] = std::move(arr);
    out << j.dump(2) << '\n';
  }
  return kOk;
}

/// Appendix checks: the shc and sinc ODEs, integrate-and-fit, gl(2).
inline int cmd_appendix(const RunConfig& c, std::ostream& out, std::ostream& err) {
  using namespace appendix;
  struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
  };
  std::vector<Check> checks;
  auto add = [&](std::string name, double v, double tol) { checks.push_back({std::move(name), v, tol, v < tol}); };
  char buf[96];
  for (double t : {0.1, 1.0, 5.0}) {
    std::snprintf(buf, sizeof buf, "shc ODE eta=1 A=1 B=0 t=%g", t);
    add(buf, std::abs(shc_ode_residual({1.0, 1.0, 0.0}, t)), 1e-10);
  }
  add("shc ODE eta=2 A=0 B=1 t=1", std::abs(shc_ode_residual({2.0, 0.0, 1.0}, 1.0)), 1e-10);
  for (double t : {0.1, 1.0, 5.0}) {
    std::snprintf(buf, sizeof buf, "sinc ODE lambda=1 A=1 B=0 t=%g", t);
    add(buf, std::abs(sinc_ode_residual({1.0, 1.0, 0.0}, t)), 1e-10);
    std::snprintf(buf, sizeof buf, "sinc ODE lambda=1 A=0 B=1 t=%g", t);
    add(buf, std::abs(sinc_ode_residual({1.0, 0.0, 1.0}, t)), 1e-10);
  }
  add("fit eta=1 A=1 B=0 on [0.5, 5]", shc_ode_integrate_and_fit({1.0, 1.0, 0.0}, 0.5, 5.0).max_deviation, 1e-6);
  add("fit eta=1 A=0 B=1 on [0.5, 5]", shc_ode_integrate_and_fit({1.0, 0.0, 1.0}, 0.5, 5.0).max_deviation, 1e-6);
  add("fit zero data", shc_ode_integrate_and_fit(1.0, 0.5, 0.0, 0.0, 5.0).max_deviation, 1e-300);
  for (const Point2 p : {Point2{2.0, 3.0}, Point2{1.0, -1.0}}) {
    for (const auto& ck : gl2_commutator_check(p, 1e-10).checks) {
      std::snprintf(buf, sizeof buf, "gl2 %s at (%g, %g)", ck.name.c_str(), p.x, p.y);
      checks.push_back({buf, ck.residual, 1e-10, ck.pass});
    }
  }
  bool all = true;
  for (const auto& ck : checks) {
    all = all && ck.pass;
    if (!ck.pass) err << "FAIL " << ck.name << ": " << ck.value << '\n';
  }
  if (c.format.value_or(Format::json) == Format::json) {
    Json j = detail::header("appendix", c);
    Json arr = Json::array();
    for (const auto& ck : checks)
      arr.push_back({{"check", ck.name}, {"residual", ck.value}, {"tolerance", ck.tolerance}, {"pass", ck.pass}});
    j["checks"] = std::move(arr);
    j["summary"] = {{"checks", checks.size()}, {"pass", all}};
    out << j.dump(2) << '\n';
  } else {
    out << "check,residual,tolerance,pass\n";
    for (const auto& ck : checks) {
      std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%d\n", ck.value, ck.tolerance, ck.pass ? 1 : 0);
      out << '"' << ck.name << '"' << buf;
    }
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace lhdeform::cli
