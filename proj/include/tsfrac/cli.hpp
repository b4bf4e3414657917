#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsfrac {

/// Exit statuses of the command-line front end.
enum ExitStatus : int {
  kExitOk = 0,
  kExitNumerical = 1,  ///< non-convergence, truncation, bound violation, failed invariant
  kExitConfig = 2,     ///< configuration or I/O error
};

/// Runs `tsfrac <subcommand> [flags]`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsfrac
