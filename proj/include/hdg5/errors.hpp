#pragma once

#include <stdexcept>
#include <string>

namespace hdg5 {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMeshError : Error {
  using Error::Error;
};

struct InvalidProblemError : Error {
  using Error::Error;
};

/// Singular element-local system; carries the element index (1-based).
struct CondensationError : Error {
  CondensationError(int element, const std::string& what)
      : Error("element " + std::to_string(element) + ": " + what), element(element) {}
  int element;
};

struct SolverError : Error {
  using Error::Error;
};

/// Newton iteration did not reach tolerance.
struct IterationFailure : SolverError {
  IterationFailure(const std::string& what, double last_residual)
      : SolverError(what), last_residual(last_residual) {}
  double last_residual;
};

struct ProjectionSingularError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hdg5
