#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xbarfilt::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kSchema = 3,
    kSolver = 4,
};

/// Runs one command line (without the program name). Reports go to `out`;
/// failures print a single `error code=N kind=K message="..."` line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace xbarfilt::cli
