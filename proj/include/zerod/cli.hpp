#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zerod::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kValidationError = 3,
  kSolverError = 4,
  kComparisonError = 5,
};

/// Runs the `zerod` command line (subcommands build, run, compare, sweep).
/// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace zerod::cli
