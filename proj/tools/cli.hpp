#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes.
enum ExitCode : int {
    kOk = 0,
    kInvalidConfig = 1,
    kOracleDisagreement = 2,
    kDivergent = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "CASCADE_OUTPUT_DIR";

/// Runs the command line `args` (without the program name). CSV goes to
/// --output, to $CASCADE_OUTPUT_DIR/<command>.csv, or to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascade::cli
