#pragma once

#include <stdexcept>
#include <string>

namespace nfbc {

// Exit-code contract for the CLI: 0 success, 1 config error, 2 numerical
// failure, 3 I/O error. Exceptions carry the class; main() maps to codes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nfbc
