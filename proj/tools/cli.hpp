#pragma once

#include <ostream>

namespace vrtestlint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitScanError = 1;
inline constexpr int kExitThreshold = 2;
inline constexpr int kExitUsage = 64;

/// Runs the command line; reports go to files named by flags, messages to `out` and `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vrtestlint::cli
