#pragma once

#include <string>
#include <vector>

namespace nfbc {

// Full command-line dispatcher. Returns the process exit code:
// 0 success, 1 config error (includes bad usage), 2 numerical failure,
// 3 I/O error. Never consults environment variables.
int run_cli(int argc, const char* const* argv);

// Same, for in-process callers (tests); args exclude the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace nfbc
