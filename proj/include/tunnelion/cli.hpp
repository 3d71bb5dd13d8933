#pragma once

#include <exception>

namespace tunnelion::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNonConvergence = 3,
    kUnsupported = 4,
};

int exit_code_for(const std::exception& e);

// Parses the command line, runs one job and returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace tunnelion::cli
