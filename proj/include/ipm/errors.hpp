#pragma once

#include <stdexcept>
#include <string>

namespace ipm {

// Thrown when inputs violate a documented precondition (bad weights, bad
// dimensions, malformed configs).  CLI maps this to exit code 1.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown for smoothness orders alpha > 1: the snowflake cost |x-y|^alpha is
// no longer a metric and the solver's feasibility structure breaks down.
struct UnsupportedSmoothnessError : ConfigError {
  using ConfigError::ConfigError;
};

// Thrown when a problem instance exceeds a hard size cap (grid caps, net
// caps, support caps for the dense solver).
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numeric routine fails its own post-solve verification or a
// fit is requested on degenerate data.  CLI maps this to exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for unreadable/unwritable files.  CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ipm
