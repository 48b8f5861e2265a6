#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freezetree::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kTestFailure = 1;
inline constexpr int kUsageError = 2;

/// Parses `args` (without the program name) and runs the subcommand.
/// Artifacts go to `out` unless --output names a file; diagnostics and the
/// summary table go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freezetree::cli
