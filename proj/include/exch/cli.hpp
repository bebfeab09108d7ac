#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exch::cli {

// Stable exit-status contract of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPositivity = 3;

/// Runs `exch <args...>` in-process; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exch::cli
