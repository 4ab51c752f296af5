#pragma once

#include <limits>
#include <string>

#include "pstereo/fields.hpp"

namespace pstereo {

// One benchmark row. Errors are absolute differences in whatever unit the
// compared fields carry (depth in mm for the scene suite, disparity in px
// where tests compare disparities). coverage_rate is NaN unless an
// uncertainty field was supplied.
struct FrameMetrics {
  std::string frame;
  double mean_err = std::numeric_limits<double>::quiet_NaN();
  double median_err = std::numeric_limits<double>::quiet_NaN();
  long long valid_px = 0;
  double runtime_ms = 0.0;
  double coverage_rate = std::numeric_limits<double>::quiet_NaN();
  bool has_errors = false;  // false when no pixel was comparable
};

// Compares the estimate against the reference over pixels valid in both.
// When sigma is non-null, coverage_rate is the fraction of compared pixels
// with |error| <= 1.96 * sigma (sigma-invalid pixels count as misses).
FrameMetrics compute_metrics(const ScalarField& estimate,
                             const ScalarField& reference,
                             const ScalarField* sigma, double runtime_ms,
                             const std::string& frame);

}  // namespace pstereo
