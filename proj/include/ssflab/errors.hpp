#pragma once

#include <stdexcept>
#include <string>

namespace ssflab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (dimension mismatch, shift too
/// small, value outside a function's domain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The numerics failed: eigensolver non-convergence, quadrature that did not
/// reach its tolerance, or an inconsistency such as a non-real trace.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssflab
