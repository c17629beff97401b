#pragma once

#include <stdexcept>
#include <string>

namespace botwatch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (trace lines, CSV rows, policy commands).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Command line that names a known verb but omits a required flag.
class UsageError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Invalid parameter or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that is well-formed but unusable (empty set, single class, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Persisted file that is truncated, has the wrong version, or fails validation.
class CorruptFileError : public Error {
 public:
  using Error::Error;
};

/// Signal with zero variance; statistics built on its autocorrelation are undefined.
class DegenerateSignalError : public Error {
 public:
  using Error::Error;
};

}  // namespace botwatch
