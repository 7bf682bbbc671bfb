#pragma once

#include <stdexcept>
#include <string>

namespace speechlen {

// Thrown for contract violations: bad input files, out-of-range values,
// preconditions not met. The message is meant for the CLI user.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operator mistakes (bad flags, malformed configs) as opposed to bad data;
// the CLI maps these to a distinct exit code.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace speechlen
