#pragma once

#include <string>
#include <vector>

namespace igahd::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kAllDiverged = 3,
  kLemmaViolated = 4,
};

/// Runs the command line `args` (without the program name). Diagnostics and
/// progress go to standard error; data only to files.
int run(const std::vector<std::string>& args);

}  // namespace igahd::cli
