#pragma once

#include <stdexcept>
#include <string>

namespace tsdiff {

// Caller broke a documented precondition (bad interval, bad parameter domain).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter name that is not valid for the requested operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration (series length too short for a duration bound, k range, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: empty/non-finite series, length mismatch, id mismatch between files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure; the message carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsdiff
