#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace feasproj {

/// Operand shapes disagree (matrix vs matrix, matrix vs mask, ...).
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter or configuration value is outside its admissible range.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A non-finite value (NaN/Inf) was encountered or produced. Solver aborts
/// keep the residual trace accumulated up to the failing iteration.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what, std::vector<double> trace = {})
      : std::runtime_error(what), residual_trace(std::move(trace)) {}

  std::vector<double> residual_trace;
};

/// Malformed input file; the message names the file and offending line.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace feasproj
