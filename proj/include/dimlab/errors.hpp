#pragma once

#include <stdexcept>
#include <string>

namespace dimlab {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point-count or allocation cap was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A requested scale lies below the resolution of the cloud (or is otherwise
/// not usable with it).
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Bad arguments: parameters outside their domain, mismatched dimensions.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough data for a regression (e.g. a scale grid that is too short).
class DiagnosticsError : public Error {
 public:
  using Error::Error;
};

/// Unrecoverable numerical failure, e.g. Cholesky failing after all jitter.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration or input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dimlab
