#pragma once

#include <stdexcept>
#include <string>

namespace epicurve {

/// Base of all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A computation whose preconditions do not hold for the data (exit code 4).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace epicurve
