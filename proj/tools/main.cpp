// Command-line scenario runner: loads a configuration, runs checks and/or a
// simulation, and writes CSV trajectories, verification reports and a run
// manifest.

#include <CLI11.hpp>
#include <iostream>

#include "spkit/runner.hpp"
#include "spkit/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spkit: simulation and certificate checking for two-time-scale "
               "systems with state-dependent time-scale functions"};
  app.set_version_flag("--version", spkit::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double t_final = 0.0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run checks and the simulation, "
                                        "writing artifacts to --out");
  run->add_option("config", config_path, "scenario configuration file")
      ->required();
  run->add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  auto* tf_opt =
      run->add_option("--t-final", t_final, "override the simulation horizon");
  run->add_flag("--quiet", quiet, "suppress console report");

  auto* check = app.add_subcommand(
      "check", "verification only: no simulation, no files written");
  check->add_option("config", config_path, "scenario configuration file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  spkit::RunnerOptions opt;
  if (run->parsed()) {
    opt.out_dir = out_dir;
    opt.quiet = quiet;
    if (seed_opt->count() > 0) opt.seed_override = seed;
    if (tf_opt->count() > 0) opt.t_final_override = t_final;
  } else {
    opt.simulate_enabled = false;
  }

  try {
    return spkit::run_scenario_path(config_path, opt, std::cout);
  } catch (const spkit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
