#pragma once

#include <iosfwd>

namespace qg::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kSolverError = 2,
    kBoundViolated = 3,
};

/// Parses argv, runs one command and returns its exit code. Results go to
/// files under --out, or to `out` when no directory is given; diagnostics go
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qg::cli
