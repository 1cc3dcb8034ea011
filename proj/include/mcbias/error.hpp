#pragma once

#include <stdexcept>
#include <string>

namespace mcbias {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (bad dimensions, invalid
/// distribution parameters, unsupported kernel/distribution pairing).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to meet its accuracy contract
/// (eigensolver non-convergence, quadrature breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete experiment / CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcbias
