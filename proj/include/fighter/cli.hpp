#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fighter::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNumericalFailure = 2,
    kFixtureMismatch = 3,
};

// Runs one command line (without the program name). Reports go to `out`
// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fighter::cli
