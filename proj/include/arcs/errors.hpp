#pragma once

#include <stdexcept>
#include <string>

namespace arcs {

/// Non-finite values, failed iterations, or a broken numerical contract.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The metric matrix of a generalized eigenproblem is not positive definite.
class IllConditionedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A small linear system is singular within pivot tolerance.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The compact SR1 middle matrix is too ill-conditioned to invert.
class SingularMemory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (IDX, CSV, config). Carries the location in the message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arcs
