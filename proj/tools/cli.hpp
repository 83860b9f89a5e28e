#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elpd::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInputError = 2,
  kEstimatorError = 3,
};

// Runs one command line (args[0] is the program name). The human-readable
// report goes to `out`, diagnostics to `err`; --output writes the JSON
// document to a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elpd::cli
