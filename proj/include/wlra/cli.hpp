#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wlra::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFailed = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line (args excludes the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wlra::cli
