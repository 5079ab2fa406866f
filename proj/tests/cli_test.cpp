#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lhdeform/cli/app.hpp"
#include "oracles.hpp"

using namespace lhdeform;
using namespace lhdeform::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lhdeform");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

using Table = std::vector<std::vector<double>>;

Table read_csv(const std::string& text, std::vector<std::string>* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = cli::detail::split(line, ',');
  Table rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto& cell : cli::detail::split(line, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

std::filesystem::path temp_path(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Config, DefaultsValidate) {
  const auto r = parse_config("");
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.config.family, Family::MP);
  EXPECT_EQ(r.config.states.size(), 2u);
}

TEST(Config, ReadsKeysCommentsAndOverrides) {
  const auto r = parse_config(
      "# scenario\n"
      "family = CR\n"
      "z = -0.25   # trailing comment\n"
      "b2 = cos(t)\n"
      "state = 0, 1; 0.5, -2\n"
      "\n"
      "zs = 0, 1\n",
      {"z=0.5", "format=json"});
  ASSERT_TRUE(r.ok()) << r.errors.front();
  EXPECT_EQ(r.config.family, Family::CR);
  EXPECT_EQ(r.config.z, 0.5);
  EXPECT_EQ(r.config.b[1], "cos(t)");
  ASSERT_EQ(r.config.states.size(), 2u);
  EXPECT_EQ(r.config.states[1].y, -2.0);
  EXPECT_EQ(r.config.zs, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(r.config.format, Format::json);
}

TEST(Config, ListsEveryError) {
  const auto r = parse_config(
      "family = XX\n"
      "rtol = -1\n"
      "samples = many\n"
      "nonsense\n"
      "colour = blue\n"
      "b1 = 1 + foo\n"
      "t1 = -5\n");
  EXPECT_FALSE(r.ok());
  std::string all;
  for (const auto& e : r.errors) all += e + "\n";
  for (const char* needle : {"config:1", "config:3", "config:4", "colour", "foo", "rtol must be positive",
                              "t1 must be greater"})
    EXPECT_NE(all.find(needle), std::string::npos) << needle << " missing from\n" << all;
  EXPECT_GE(r.errors.size(), 7u);
}

TEST(Config, StateOutsideChartIsRejected) {
  const auto r = parse_config("family = MP\nstate = 0, 1; 2, 1\n");
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.errors.front().find("copy 1"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto r = run_cli({"simulate", "--set", "rtol=0", "--set", "bogus=1"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  EXPECT_NE(r.err.find("rtol"), std::string::npos);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kConfigError);
  EXPECT_EQ(run_cli({"verify", "--format", "xml"}).code, kConfigError);
  EXPECT_EQ(run_cli({}).code, kConfigError);
}

TEST(Cli, ConfigFile) {
  const auto path = temp_path("lhdeform_cli_test.cfg");
  {
    std::ofstream f(path);
    f << "command_independent = 1\n";
  }
  EXPECT_EQ(run_cli({"pdm", "--config", path.string()}).code, kConfigError);
  {
    std::ofstream f(path);
    f << "pdm_zs = 0\ncount = 3\n";
  }
  const auto r = run_cli({"pdm", "--config", path.string()});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(read_csv(r.out).size(), 3u);
  std::filesystem::remove(path);
}

TEST(Verify, DefaultGridPasses) {
  const auto r = run_cli({"verify"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rep = Json::parse(r.out);
  EXPECT_EQ(rep["schema"], "lhdeform.verify");
  EXPECT_EQ(rep["schema_version"], 1);
  EXPECT_EQ(rep["seed"], 20260101);
  EXPECT_TRUE(rep["summary"]["pass"].get<bool>());
  EXPECT_LT(rep["summary"]["max_residual"].get<double>(), 1e-9);
  // MP at three c values plus CR and 2R, each at five z values.
  EXPECT_EQ(rep["configurations"].size(), 25u);
  std::set<std::string> suites;
  for (const auto& cfg : rep["configurations"])
    for (const auto& res : cfg["results"]) {
      suites.insert(res["suite"].get<std::string>());
      EXPECT_EQ(res["samples"], 200);
    }
  for (const char* s : {"bracket", "casimir", "commutator", "hamiltonian-field", "lie-derivative", "classical-limit"})
    EXPECT_TRUE(suites.count(s)) << s;
  EXPECT_TRUE(rep["sampling"].contains("2R"));
}

TEST(Verify, CorruptedH2FailsWithNamedIdentity) {
  const auto r = run_cli({"verify", "--set", "inject_fault=h2", "--set", "families=MP", "--set", "zs=0.1"});
  EXPECT_EQ(r.code, kCheckFailed);
  const auto rep = Json::parse(r.out);
  EXPECT_FALSE(rep["summary"]["pass"].get<bool>());
  bool named = false;
  for (const auto& cfg : rep["configurations"])
    for (const auto& res : cfg["results"])
      if (res["suite"] == "bracket" && !res["pass"].get<bool>() && res["identity"] == "{h1,h3} = -2 h2") named = true;
  EXPECT_TRUE(named);
  EXPECT_NE(r.err.find("{h1,h3} = -2 h2"), std::string::npos);
}

TEST(Verify, UndeformedOnlyMatchesClassicalRelations) {
  const auto r = run_cli({"verify", "--set", "zs=0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rep = Json::parse(r.out);
  bool saw_classical = false;
  for (const auto& cfg : rep["configurations"])
    for (const auto& res : cfg["results"]) {
      if (res["suite"] == "classical-limit") saw_classical = true;
      if (res["suite"] == "bracket" || res["suite"] == "classical-limit") {
        EXPECT_LT(res["max_residual"].get<double>(), 1e-13) << res["identity"];
      }
    }
  EXPECT_TRUE(saw_classical);
}

TEST(Verify, DeterministicAndSeedDependent) {
  const auto a = run_cli({"verify", "--set", "families=CR", "--set", "zs=0.1"});
  const auto b = run_cli({"verify", "--set", "families=CR", "--set", "zs=0.1"});
  const auto c = run_cli({"verify", "--set", "families=CR", "--set", "zs=0.1", "--seed", "7"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(Json::parse(c.out)["seed"], 7);
}

TEST(Verify, CsvRows) {
  const auto r = run_cli({"verify", "--format", "csv", "--set", "families=2R", "--set", "zs=1"});
  ASSERT_EQ(r.code, kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "family,z,c,suite,identity,measure,samples,max_residual,tolerance,pass");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(0, 3), "2R,");
    EXPECT_EQ(line.back(), '1');
  }
  EXPECT_GT(rows, 5);
}

TEST(Simulate, Sinusoid) {
  const auto r = run_cli({"simulate", "--set", "family=MP", "--set", "z=0", "--set", "c=0", "--set", "omega2=1",
                          "--set", "state=0,1", "--set", "rtol=1e-11", "--set", "atol=1e-13"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::vector<std::string> head;
  const auto rows = read_csv(r.out, &head);
  EXPECT_EQ(head, (std::vector<std::string>{"t", "x", "y", "h_z", "F_z"}));
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row[1], std::sin(row[0]), 1e-8);
    EXPECT_NEAR(row[2], std::cos(row[0]), 1e-8);
    EXPECT_NEAR(row[3], 0.5, 1e-8);
  }
  EXPECT_EQ(rows.back()[0], 10.0);
}

TEST(Simulate, DeformedMPRunsToCompletion) {
  const auto r = run_cli({"simulate", "--set", "z=0.5", "--set", "c=2", "--set", "omega2=1+0.2*cos(t)",
                          "--format", "json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rep = Json::parse(r.out);
  EXPECT_TRUE(rep["complete"].get<bool>());
  EXPECT_EQ(rep["samples"].back()["t"], 10.0);
  const double want = expected_casimir(build_realization(Family::MP, 0.5, 2.0));
  for (const auto& s : rep["samples"]) EXPECT_NEAR(s["F_z"].get<double>(), want, 1e-9);
}

TEST(Simulate, DeformedCRMatchesDirectFieldAtStart) {
  const double dt = 1e-4;
  const auto r = run_cli({"simulate", "--set", "family=CR", "--set", "z=0.4", "--set", "b1=1", "--set",
                          "b2=cos(t)", "--set", "b3=0.1", "--set", "state=0,1", "--set", "t1=" + std::to_string(2 * dt),
                          "--set", "samples=3", "--set", "rtol=1e-13", "--set", "atol=1e-15"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = read_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  const SL2Realization real = build_realization(Family::CR, 0.4, kComplexRiccatiCasimir);
  RunConfig cfg;
  cfg.b = {"1", "cos(t)", "0.1"};
  const Point2 v = assemble_system(real, cfg.coefficients())(0.0, {0.0, 1.0});
  // Second-order one-sided difference from the printed samples.
  const double dx = (-3 * rows[0][1] + 4 * rows[1][1] - rows[2][1]) / (2 * dt);
  const double dy = (-3 * rows[0][2] + 4 * rows[1][2] - rows[2][2]) / (2 * dt);
  EXPECT_NEAR(dx, v.x, 1e-6 * (1 + std::abs(v.x)));
  EXPECT_NEAR(dy, v.y, 1e-6 * (1 + std::abs(v.y)));
  EXPECT_GT(std::abs(v.x) + std::abs(v.y), 0.1);
}

TEST(Simulate, IntegrationFailureFlagsPartialOutput) {
  // y' = b1 h-gradient blows up for rapidly growing coefficients.
  const auto r = run_cli({"simulate", "--set", "z=0", "--set", "c=0", "--set", "b1=-exp(5*t)", "--set", "b2=0",
                          "--set", "b3=exp(5*t)", "--set", "state=1,0", "--set", "t1=200", "--format", "json"});
  EXPECT_EQ(r.code, kPartialRun);
  EXPECT_NE(r.err.find("partial trajectory"), std::string::npos);
  const auto rep = Json::parse(r.out);
  EXPECT_FALSE(rep["complete"].get<bool>());
  EXPECT_TRUE(rep.contains("failure"));
  EXPECT_LT(rep["samples"].back()["t"].get<double>(), 200.0);
}

TEST(Drift, DefaultScenarioWithinTolerance) {
  const auto out = temp_path("lhdeform_drift.csv");
  const auto r = run_cli({"drift", "--out", out.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream summary_file(out.string() + ".summary.json");
  ASSERT_TRUE(summary_file.good());
  const auto s = Json::parse(summary_file);
  EXPECT_EQ(s["schema"], "lhdeform.drift");
  EXPECT_LT(s["relative_drift"].get<double>(), 1e-6);
  EXPECT_TRUE(s["within_tolerance"].get<bool>());
  std::ifstream csv(out);
  std::stringstream text;
  text << csv.rdbuf();
  std::vector<std::string> head;
  const auto rows = read_csv(text.str(), &head);
  EXPECT_EQ(head, (std::vector<std::string>{"t", "F2"}));
  EXPECT_EQ(rows.size(), 101u);
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".summary.json");
}

TEST(Drift, UndeformedStartMatchesClosedForm) {
  const auto r = run_cli({"drift", "--set", "z=0", "--format", "json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto s = Json::parse(r.out);
  const SL2Realization real = build_realization(Family::MP, 0.0, 4.0);
  const double want = f2_closed_form(real, {1.0, 0.0}, {2.0, 1.0});
  EXPECT_NEAR(s["series"].front()["F2"].get<double>(), want, 1e-12 * std::abs(want));
  EXPECT_NEAR(s["initial"].get<double>(), want, 1e-12 * std::abs(want));
}

TEST(Drift, LooserToleranceDriftsMore) {
  auto drift_at = [](const std::string& rtol, const std::string& atol) {
    const auto r = run_cli({"drift", "--format", "json", "--set", "rtol=" + rtol, "--set", "atol=" + atol});
    EXPECT_NE(r.code, kPartialRun);
    return Json::parse(r.out)["relative_drift"].get<double>();
  };
  const double tight = drift_at("1e-10", "1e-12");
  const double loose = drift_at("1e-8", "1e-10");
  EXPECT_GT(loose, tight);
  EXPECT_GT(loose, 5 * tight);
}

TEST(Drift, DiagonalFlowIsFlaggedForDeformation) {
  const auto r = run_cli({"drift", "--set", "flow=diagonal", "--format", "json"});
  EXPECT_EQ(r.code, kCheckFailed);
  EXPECT_FALSE(Json::parse(r.out)["within_tolerance"].get<bool>());
}

TEST(Drift, NeedsTwoCopies) {
  EXPECT_EQ(run_cli({"drift", "--set", "state=1,0"}).code, kConfigError);
}

TEST(Map, ForwardAndInverse) {
  const auto f = Json::parse(run_cli({"map"}).out);
  EXPECT_EQ(f["mp_point"][0], 1.0);
  EXPECT_EQ(f["mp_point"][1], 1.0);
  EXPECT_EQ(f["side"], 1);
  const auto g = run_cli({"map", "--set", "map=2R", "--set", "point=1,-1", "--set", "branch=plus"});
  ASSERT_EQ(g.code, kOk);
  const auto gj = Json::parse(g.out);
  EXPECT_NEAR(gj["mp_point"][0].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(gj["mp_point"][1].get<double>(), 0.0, 1e-15);
  EXPECT_EQ(gj["side"], 1);
  const auto inv = Json::parse(run_cli({"map", "--set", "direction=inverse", "--set", "point=1,1"}).out);
  EXPECT_NEAR(inv["riccati_point"][0].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(inv["riccati_point"][1].get<double>(), 2.0, 1e-12);
}

TEST(Map, SingularPointAndWrongBranch) {
  EXPECT_EQ(run_cli({"map", "--set", "point=1,0"}).code, kCheckFailed);
  EXPECT_EQ(run_cli({"map", "--set", "map=MP"}).code, kConfigError);
}

TEST(Pdm, TableShapes) {
  const auto r = run_cli({"pdm"});
  ASSERT_EQ(r.code, kOk);
  std::vector<std::string> head;
  const auto rows = read_csv(r.out, &head);
  EXPECT_EQ(head, (std::vector<std::string>{"x", "z", "m_z", "U_osc", "U_rw"}));
  ASSERT_EQ(rows.size(), 4u * 121u);
  for (const auto& row : rows) {
    if (row[0] == 0.0) {
      EXPECT_EQ(row[2], 1.0);
    }
    if (row[1] == 0.0) {
      EXPECT_EQ(row[2], 1.0);
      EXPECT_NEAR(row[3], row[0] * row[0], 1e-11 * (1 + row[0] * row[0]));
      if (row[0] != 0.0) {
        EXPECT_NEAR(row[4], 1 / (row[0] * row[0]), 1e-10 / (row[0] * row[0]));
      }
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto &a = rows[i - 1], &b = rows[i];
    if (a[1] != b[1] || a[1] <= 0) continue;
    if (std::abs(b[0]) > std::abs(a[0])) {
      EXPECT_LT(b[2], a[2]) << a[1] << " " << b[0];
    } else if (std::abs(b[0]) < std::abs(a[0])) {
      EXPECT_GT(b[2], a[2]) << a[1] << " " << b[0];
    }
  }
}

TEST(Pdm, CsvMatchesMemoryAtTwelveDigits) {
  const auto r = run_cli({"pdm", "--set", "pdm_zs=0.5,2", "--set", "count=37", "--set", "x_min=-2.5"});
  const auto rows = read_csv(r.out);
  const auto want = tabulate_pdm({0.5, 2.0}, -2.5, 3.0, 37);
  ASSERT_EQ(rows.size(), want.size());
  auto same = [](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 5e-12 * std::abs(b);
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(same(rows[i][0], want[i].x));
    EXPECT_TRUE(same(rows[i][2], want[i].mass));
    EXPECT_TRUE(same(rows[i][3], want[i].oscillator));
    EXPECT_TRUE(same(rows[i][4], want[i].rosochatius));
  }
}

TEST(Appendix, AllChecksPass) {
  const auto r = run_cli({"appendix"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rep = Json::parse(r.out);
  EXPECT_TRUE(rep["summary"]["pass"].get<bool>());
  bool sinc = false, gl2 = false;
  for (const auto& c : rep["checks"]) {
    const std::string name = c["check"];
    if (name.rfind("sinc", 0) == 0) sinc = true;
    if (name.rfind("gl2", 0) == 0) gl2 = true;
    if (name.rfind("shc ODE", 0) == 0) {
      EXPECT_LT(c["residual"].get<double>(), 1e-10);
    }
  }
  EXPECT_TRUE(sinc);
  EXPECT_TRUE(gl2);
}

TEST(Output, CommandsAreDeterministic) {
  for (const char* cmd : {"simulate", "drift", "pdm", "appendix", "map"}) {
    const auto a = run_cli({cmd, "--format", "json"});
    const auto b = run_cli({cmd, "--format", "json"});
    EXPECT_EQ(a.out, b.out) << cmd;
  }
}

TEST(Output, SimulateCsvMatchesJsonAtTwelveDigits) {
  const auto csv = read_csv(run_cli({"simulate"}).out);
  const auto json = Json::parse(run_cli({"simulate", "--format", "json"}).out)["samples"];
  ASSERT_EQ(csv.size(), json.size());
  const char* keys[] = {"t", "x", "y", "h_z", "F_z"};
  for (std::size_t i = 0; i < csv.size(); ++i)
    for (std::size_t k = 0; k < 5; ++k) {
      const double want = json[i][keys[k]].get<double>();
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", want);
      EXPECT_EQ(csv[i][k], std::strtod(buf, nullptr));
      EXPECT_LE(std::abs(csv[i][k] - want), 5e-12 * std::abs(want));
    }
}
