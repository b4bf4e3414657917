#pragma once

#include <stdexcept>
#include <string>

namespace tsfrac {

/// Bad index, mismatched grids, malformed descriptor.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value outside the mathematical domain of an operation (t < s, alpha <= -1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fractional order requested on a scale without a closed-form power function.
class UnsupportedScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Delta derivative requested at the terminal point.
class TerminalPointError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Not enough points for the requested number of forward differences.
class InsufficientGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side produced a non-finite value.
class RhsEvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data does not satisfy the integral inequality it is claimed to satisfy.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or file I/O problem (CLI exit status 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsfrac
