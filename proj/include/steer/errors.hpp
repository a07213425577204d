#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steer {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural misuse: mismatched dimensions, bad indices, empty grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input that is structurally fine but fails a numerical validity check
// (negative eigenvalue, signalling marginal, non-unit trace, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. `byte_offset` points at the offending position
// when known, otherwise 0.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset = 0)
      : Error(what), byte_offset(byte_offset) {}
  std::size_t byte_offset;
};

// apply_perturbation was asked for a weight outside the feasible range.
class InfeasibleWeightError : public Error {
 public:
  InfeasibleWeightError(const std::string& what, int outcome, int input,
                        double min_eigenvalue)
      : Error(what),
        outcome(outcome),
        input(input),
        min_eigenvalue(min_eigenvalue) {}
  int outcome;
  int input;
  double min_eigenvalue;
};

// Internal consistency check tripped (should not happen on valid inputs).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace steer
