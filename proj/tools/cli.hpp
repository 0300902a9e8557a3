#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twostage/sim.hpp"

namespace twostage::cli {

/// Process exit codes; stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitRefusedOverwrite = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TWOSTAGE_OUT_DIR";

/// Parameter grid for a named figure, or throws ConfigError listing valid ids.
ExperimentConfig figure_preset(const std::string& figure);

/// Entry point shared by main() and the tests. Summaries go to out,
/// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twostage::cli
