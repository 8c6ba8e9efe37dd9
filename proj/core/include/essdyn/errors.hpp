#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace essdyn {

/// Base class for every failure the library reports.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data: bad sizes, non-finite values, violated field constraints.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

/// Detailed balance cannot hold for the given interaction matrix.
/// Carries the witnessing species pair (0-based).
class NoBalancingError : public Error {
 public:
  NoBalancingError(const std::string& what, int i, int j)
      : Error(what), species_i(i), species_j(j) {}
  int species_i;
  int species_j;
};

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

class NotBalancedError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, double eigenvalue)
      : Error(what), offending_eigenvalue(eigenvalue) {}
  double offending_eigenvalue;
};

/// The solver refuses to run: strict competition or non-extinction fails.
class HypothesisViolationError : public Error {
 public:
  HypothesisViolationError(const std::string& what, std::string hypothesis, int species)
      : Error(what), hypothesis(std::move(hypothesis)), species(species) {}
  std::string hypothesis;  // "strict_competition" or "non_extinction"
  int species;             // 0-based; -1 when not species-specific
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, Eigen::VectorXd best, int iterations)
      : Error(what), best_iterate(std::move(best)), iterations(iterations) {}
  Eigen::VectorXd best_iterate;
  int iterations;
};

class TooManySubsetsError : public Error {
 public:
  using Error::Error;
};

class NotStationaryError : public Error {
 public:
  using Error::Error;
};

/// A model functional produced a non-finite intermediate (overflow).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& what, double t, Eigen::VectorXd state)
      : Error(what), t(t), state(std::move(state)) {}
  double t;
  Eigen::VectorXd state;
};

class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(const std::string& what, double t) : Error(what), t(t) {}
  double t;
};

}  // namespace essdyn
