// Subcommand implementations behind the CLI: each builds the scenario's
// geometry and flow, runs the requested checks or solves, writes CSV files
// into the output directory and prints one PASS/FAIL line per check.
//
// Exit codes: 0 all checks passed, 2 configuration error, 3 numeric
// failure. Output files are byte-identical across repeated runs with the
// same scenario (fixed seeds, fixed reduction order, fixed formatting).
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "efem/config.hpp"

namespace efem {

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides the scenario's out_dir
  int workers = 0;                     // 0: take from scenario
  std::optional<std::uint64_t> seed;
};

extern const char* const kSubcommands[7];
bool subcommand_exists(const std::string& name);

int run_subcommand(const std::string& name, const Scenario& scenario,
                   const RunOptions& options, std::ostream& log);

}  // namespace efem
