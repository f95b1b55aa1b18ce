#pragma once

#include <stdexcept>
#include <string>

namespace opinet {

inline constexpr const char* kVersion = "1.0.0";

// Process exit codes used by the command line tool. 0 is success and 1 is
// reserved for unclassified failures.
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// Invalid parameters, malformed config documents, violated preconditions.
// Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation produced a non-finite value or diverged. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable, unwritable, or malformed files. Exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace opinet
