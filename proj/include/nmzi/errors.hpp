#pragma once

#include <stdexcept>

namespace nmzi {

/// Argument outside the mathematical domain of an operation (sigma <= 0, transmission > 1, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration (unknown labels, unresolvable frequencies).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quadrature grid does not cover the state's probability mass.
struct TailTruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedCentroidError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pre- and post-selected states are orthogonal.
struct UndefinedWeakValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sampling plan is inconsistent with the signal (Nyquist, length mismatch).
struct PlanError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace nmzi
