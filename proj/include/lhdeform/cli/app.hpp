#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lhdeform/cli/commands.hpp"
#include "lhdeform/cli/config.hpp"

namespace lhdeform::cli {

/// Parses argv, loads the config and runs one subcommand. Returns the
/// process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Poisson-Hopf deformed Lie-Hamilton systems on the plane", "lhdeform"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed, format, out_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override one config key (key=value), repeatable")->take_all();
  app.add_option("--seed", seed, "seed for sampled verification points");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "output path (default: standard output)");

  const char* names[][2] = {{"verify", "identity suites over the (family, z, c) grid"},
                            {"simulate", "integrate one trajectory"},
                            {"drift", "two-copy F_z^(2) drift"},
                            {"map", "map a point between a Riccati plane and MP"},
                            {"pdm", "position-dependent mass tables"},
                            {"appendix", "appendix ODE and gl(2) checks"}};
  for (const auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  if (!seed.empty()) sets.push_back("seed=" + seed);
  if (!format.empty()) sets.push_back("format=" + format);
  if (!out_path.empty()) sets.push_back("out=" + out_path);
  const ConfigResult cr = config_path.empty() ? parse_config("", sets) : load_config(config_path, sets);
  if (!cr.ok()) {
    for (const auto& e : cr.errors) err << "config error: " << e << '\n';
    return kConfigError;
  }
  const RunConfig& c = cr.config;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) {
      err << "cannot write " << c.out << '\n';
      return kConfigError;
    }
    sink = &file;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "verify") return cmd_verify(c, *sink, err);
    if (cmd == "simulate") return cmd_simulate(c, *sink, err);
    if (cmd == "map") return cmd_map(c, *sink, err);
    if (cmd == "pdm") return cmd_pdm(c, *sink, err);
    if (cmd == "appendix") return cmd_appendix(c, *sink, err);
    if (cmd == "drift") {
      if (c.out.empty()) return cmd_drift(c, *sink, err, err);
      std::ofstream summary(c.out + ".summary.json");
      return cmd_drift(c, *sink, summary, err);
    }
  } catch (const Error& e) {
    err << cmd << ": " << e.what() << '\n';
    return kCheckFailed;
  }
  return kConfigError;
}

}  // namespace lhdeform::cli
