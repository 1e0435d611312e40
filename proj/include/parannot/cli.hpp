#pragma once

// The parannot command-line toolbox as a library entry point so tests can
// drive it without spawning processes.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage or I/O error.

#include <ostream>
#include <string>
#include <vector>

namespace parannot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parannot
