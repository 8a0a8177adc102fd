#pragma once

#include <stdexcept>
#include <string>

namespace hambubble {

/// Base of every library error. The CLI maps the concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (exit code 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Singular or off-surface input to a geometry routine.
class GeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure did not reach its accuracy target (exit code 3).
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Shooting could not bracket or converge on the ground state.
class SolverError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

/// The blow-up theorem's hypotheses are not met, so no prediction is made (exit code 4).
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hambubble
