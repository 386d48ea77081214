#pragma once

#include <stdexcept>
#include <string>

namespace ortho {

// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid family parameters, op arguments, or run configuration.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Two lattice nodes x_k coincide where distinctness is required.
class NodeCollisionError : public Error {
 public:
  using Error::Error;
};

// Two eigenvalues h_k coincide, so a connection/recurrence denominator vanishes.
class EigenvalueCollisionError : public Error {
 public:
  using Error::Error;
};

// The family's weight series is divergent (convergence precondition violated).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// No candidate canonical-parameter root reproduces the moment expansion.
class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ortho
