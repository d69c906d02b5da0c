#ifndef OUQ_ERRORS_HPP
#define OUQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ouq {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A moment sequence lies outside the moment space of its interval.
struct InfeasibleMoments : Error {
  using Error::Error;
};

// A moment sequence touches the boundary of the moment space while further
// constraints follow; the measure is already uniquely determined.
struct BoundaryMoments : Error {
  using Error::Error;
};

// A claimed polynomial root does not satisfy the residual tolerance, or a
// root escapes the support interval.
struct RootFindingFailure : Error {
  using Error::Error;
};

// The weight solve produced a weight below the clamp tolerance.
struct NegativeWeight : Error {
  using Error::Error;
};

// Atoms coincide after merging; the weight system cannot be solved.
struct SingularSystem : Error {
  using Error::Error;
};

// A model was evaluated outside its physical domain.
struct DomainError : Error {
  using Error::Error;
};

// Generic failure reported by a model backend.
struct ModelEvaluationError : Error {
  using Error::Error;
};

// Malformed exchange with an external model process.
struct ProtocolError : ModelEvaluationError {
  using ModelEvaluationError::ModelEvaluationError;
};

// An external model batch did not answer in time.
struct TimeoutError : ModelEvaluationError {
  using ModelEvaluationError::ModelEvaluationError;
};

// The external model process terminated unexpectedly.
struct ProcessExit : ModelEvaluationError {
  using ModelEvaluationError::ModelEvaluationError;
};

// No sign change found for the quantile bisection in the expanded interval.
struct BracketingFailure : Error {
  using Error::Error;
};

// Numerical integration failed to reach the requested tolerance.
struct QuadratureFailure : Error {
  using Error::Error;
};

// Problem description (file or in-memory) is invalid.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ouq

#endif
