#pragma once

#include <string>

namespace gasflow::cli {

enum ExitCode : int {
  kOk = 0,
  kNotFound = 1,  // infeasible or nothing found
  kInputError = 2,
  kNumericalFailure = 3,
};

struct CommandResult {
  int exit_code = kOk;
  /// JSON document for standard output; empty on usage errors.
  std::string payload;
};

/// Parses argv and runs one subcommand. Diagnostics go to standard error.
CommandResult run(int argc, const char* const* argv);

}  // namespace gasflow::cli
