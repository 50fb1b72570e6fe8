#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace beamfocus::cli {

enum ExitCode : int {
    kSuccess = 0,
    kRuntimeError = 1,
    kConfigError = 2,
    kBudgetExceeded = 3,
    kValidationFailed = 4,
};

/// Runs one command line (args excludes the program name) and returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beamfocus::cli
