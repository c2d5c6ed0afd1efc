// Command-line front end: scenario checks, solves and studies for function
// spaces and parabolic equations on moving intervals and closed curves.
//
//   efem <subcommand> --config <path> [--out <dir>] [--workers <k>]
//                     [--seed <u64>]
//
// Subcommands: check-flow, check-lambda, check-transport,
// check-equivalence, solve, converge, stability.
#include <CLI11.hpp>
#include <iostream>

#include "efem/errors.hpp"
#include "efem/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"evolving-domain finite elements"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool out_set = false;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  for (const char* name : efem::kSubcommands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario file")->required();
    sub->add_option("--out", out_dir, "output directory for CSV files")
        ->each([&](const std::string&) { out_set = true; });
    sub->add_option("--workers", workers, "worker threads for fan-out");
    sub->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_set = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const efem::Scenario scenario = efem::load_config(config_path);
    efem::RunOptions options;
    if (out_set) options.out_dir = out_dir;
    options.workers = workers;
    if (seed_set) options.seed = seed;
    return efem::run_subcommand(name, scenario, options, std::cout);
  } catch (const efem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
