#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace formalcalc::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kInputError = 2 };

/// Runs the command line `args` (without the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace formalcalc::cli
