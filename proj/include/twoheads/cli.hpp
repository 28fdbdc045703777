#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twoheads {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime or I/O
inline constexpr int kExitUsage = 2;

// Entry point for the `twoheads` tool. args excludes the program name.
// Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twoheads
