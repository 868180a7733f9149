#pragma once

#include <stdexcept>
#include <string>

namespace magdimer {

/// Invalid physical parameter (negative loss rate, nonpositive drive frequency, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a formula (zero amplitude in polar form, unphysical CM).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite numbers or a failed numerical routine.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver gave up: step-size underflow, continuation truncation, missing root.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magdimer
