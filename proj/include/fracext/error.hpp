#pragma once

#include <stdexcept>
#include <string>

namespace fracext {

// Exception hierarchy for the core library.  The C API maps each type onto
// one status code (see fracext.h).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (z <= 0 for K_nu, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: bad mesh sizes, malformed study file, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Assembly failure (non-SPD coefficient at a quadrature point) or a linear
// solver that did not converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracext
