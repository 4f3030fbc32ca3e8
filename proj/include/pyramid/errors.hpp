#pragma once

#include <stdexcept>
#include <string>

namespace pyramid {

/// Input outside the mathematical domain of an operation (non-finite
/// coordinates, negative probabilities, points outside a required region).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A table or file is missing required structure.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition does not hold for otherwise well-formed input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too few events to estimate a quantity.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Results of independent checks contradict each other. Never expected on
/// valid input; indicates a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pyramid
