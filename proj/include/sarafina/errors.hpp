#pragma once

#include <stdexcept>
#include <string>

namespace sarafina {

// Base class for every error the library raises.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invariant violations on domain objects (bad shares, unordered years, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Numeric arguments outside their documented range.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Series/trajectory year mismatches and missing years.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

// File system failures (missing input, unwritable output).
class IoError : public Error {
  public:
    using Error::Error;
};

// Bad CLI flag combinations or malformed config files.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace sarafina
