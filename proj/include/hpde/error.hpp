#pragma once

#include <stdexcept>
#include <string>

namespace hpde {

// Process exit codes used by the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNumeric = 2,
};

// Malformed arguments, dimension mismatches, bad files.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Non-convergence, divergence, singular systems, failed verification.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Operation invalid for the current state (e.g. stepping a finished run).
class StateError : public std::runtime_error {
 public:
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hpde
