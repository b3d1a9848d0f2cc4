#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cxorder {

/// Exit codes shared by every command.
enum ExitCode : int { kHolds = 0, kFails = 1, kInputError = 2, kHypothesisFailure = 3 };

/// Runs the command line given without the program name. Primary output goes
/// to `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cxorder
