#pragma once

#include <stdexcept>
#include <string>

namespace fdbeam {

// Malformed configuration or scene input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent dataset input (CLI exit code 3).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Oracle cross-check mismatch in --verify mode (CLI exit code 4).
struct VerifyError : std::runtime_error {
  explicit VerifyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fdbeam
