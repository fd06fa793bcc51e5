#pragma once

#include <stdexcept>
#include <string>

namespace lievio {

/// Input outside the domain of an algebraic map (near-zero projection
/// argument, non-unit rotation axis, non-skew matrix, ...).
struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A landmark coincides with (or is too close to) a camera center.
struct SingularMeasurement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values produced while integrating state or covariance.
struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Covariance lost positive definiteness after a correction step.
struct CovarianceCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

struct InsufficientHistory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lievio
