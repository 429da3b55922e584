#pragma once

#include <stdexcept>
#include <string>

namespace sketchlab {

/// Invalid argument shapes or parameter values.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on the numeric input does not hold
/// (unnormalized matrix, indefinite PSD input, insufficient rank).
class ContractError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative kernel failed to converge, training diverged, or a traced
/// division was not guarded by a branch.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial enumeration would exceed the configured cap.
class FeasibilityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace sketchlab
