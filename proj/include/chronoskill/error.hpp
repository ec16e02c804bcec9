#pragma once

#include <stdexcept>
#include <string>

namespace chronoskill {

// Shape or argument violations (mismatched tensor dims, invalid head count, ...).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// API misuse: stepping a finished episode, backward on a value that is not on
// the tape, and similar caller errors.
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed file contents (config, checkpoint, metrics CSV).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A NaN or Inf reached an exposed boundary.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures, always carrying the offending path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chronoskill
