// msol command line: one JSON config per run, results under --out.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "msol/acceptance.hpp"
#include "msol/commands.hpp"
#include "msol/common.hpp"

namespace {

const std::map<std::string, std::string> kAbout{
    {"build", "validate a solenoid, classify its transversal, check minimality"},
    {"ergodic", "invariant transversal measures and unique ergodicity"},
    {"pair", "pair the current with the configured forms"},
    {"homology", "homology class of the current (pairings with dtheta_i)"},
    {"dualform", "dual form on a periodic grid and the class check"},
    {"selfint", "self-intersection refinement table and flowbox bounds"},
    {"decompose", "regular/irregular decomposition of a solenoid measure"},
    {"acceptance", "run the acceptance criteria, one PASS/FAIL line each"},
};

constexpr int kExitConfig = 2;
constexpr int kExitContract = 3;

msol::Json read_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw msol::ConfigError("", "cannot open config file " + file);
  try {
    return msol::Json::parse(in);
  } catch (const msol::Json::parse_error& e) {
    throw msol::ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measured solenoids: dynamics, currents and dual forms"};
  app.set_version_flag("--version", msol::kToolVersion);
  app.require_subcommand(1, 1);

  std::string config, out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<int> criteria;
  for (const auto& name : msol::command_names()) {
    auto* sub = app.add_subcommand(name, kAbout.at(name));
    if (name == "acceptance") {
      sub->add_option("criteria", criteria, "criterion ids (default all)")->check(CLI::Range(1, msol::kCriterionCount));
      sub->add_option("--config", config, "ignored except for echo");
    } else {
      sub->add_option("--config", config, "experiment config (JSON)")->required();
    }
    sub->add_option("--out", out, "output directory (default: config 'output')");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  msol::set_thread_count(static_cast<unsigned>(threads));

  try {
    if (command == "acceptance") {
      bool ok = true;
      const auto res = msol::run_acceptance(criteria);
      for (const auto& r : res) {
        std::cout << msol::format_criterion(r) << "\n";
        ok = ok && r.pass;
      }
      if (sub->count("--out")) {
        msol::RunReport rep;
        rep.command = command;
        rep.echo = msol::Json::object();
        msol::Json rows = msol::Json::array();
        for (const auto& r : res) rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        rep.results = {{"criteria", rows}, {"all_pass", ok}};
        msol::write_report(rep, out);
      }
      return ok ? 0 : kExitContract;
    }

    auto j = read_json(config);
    if (sub->count("--seed")) j["seed"] = seed;
    if (sub->count("--out")) j["output"] = out;
    const auto cfg = msol::parse_config(j);
    const auto rep = msol::run_command(command, cfg);
    msol::write_report(rep, cfg.output);
    std::fprintf(stderr, "%s: %.3f s, output in %s\n", command.c_str(), rep.wall_seconds, cfg.output.c_str());
    std::cout << rep.results.dump(2) << "\n";
    return rep.ok ? 0 : kExitContract;
  } catch (const msol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const msol::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const msol::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitContract;
  } catch (const msol::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
