#pragma once

#include <stdexcept>
#include <string>

namespace apm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or configuration (k = 0, L <= 0, malformed fraction, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A request would read a measure outside the window where it is known exactly.
class WindowError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed (e.g. stage stability). Signals a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Projected work exceeds the configured atom cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace apm
