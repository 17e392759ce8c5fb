#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace excellence::cli {

// Stable exit codes for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitComputation = 3;

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excellence::cli
