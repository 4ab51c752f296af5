#pragma once

#include <stdexcept>
#include <string>

namespace pstereo {

// Bad parameter values, malformed calibration/scene/config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class IoErrorKind {
  missing_file,
  decode_failure,
  dimension_mismatch,
  write_failure,
};

// File-level failures. `kind` lets callers (and tests) tell the cases apart
// without string matching.
struct IoError : std::runtime_error {
  IoErrorKind kind;
  IoError(IoErrorKind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

// Structurally unusable input data, e.g. an image smaller than one patch.
struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pstereo
