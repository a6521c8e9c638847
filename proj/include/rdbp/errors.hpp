#pragma once

#include <stdexcept>
#include <string>

namespace rdbp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where the requested quantity exists.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation needs a claim law with bounded support.
class UnboundedClaimError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not converge within its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// No closed form is available for the requested law kind.
class UnsupportedKind : public Error {
 public:
  using Error::Error;
};

/// Invalid process or run configuration (including index overflow).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the laws of a check is not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// No trajectory grew large enough for growth-rate statistics.
class InsufficientSurvivors : public Error {
 public:
  using Error::Error;
};

}  // namespace rdbp
