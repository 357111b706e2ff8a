#pragma once

namespace rlr::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kDivergence = 3,
};

int run(int argc, char** argv);

}  // namespace rlr::cli
