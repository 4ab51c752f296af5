#include "pstereo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pstereo {

FrameMetrics compute_metrics(const ScalarField& estimate,
                             const ScalarField& reference,
                             const ScalarField* sigma, double runtime_ms,
                             const std::string& frame) {
  FrameMetrics m;
  m.frame = frame;
  m.runtime_ms = runtime_ms;
  m.mean_err = std::numeric_limits<double>::quiet_NaN();
  m.median_err = std::numeric_limits<double>::quiet_NaN();
  m.coverage_rate = std::numeric_limits<double>::quiet_NaN();
  m.valid_px = estimate.valid_count();

  std::vector<double> errs;
  errs.reserve(estimate.size());
  long long covered = 0;
  long long compared = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (!estimate.valid[i] || !reference.valid[i]) continue;
    const double e = std::abs(estimate.values[i] - reference.values[i]);
    errs.push_back(e);
    ++compared;
    if (sigma && sigma->valid[i] && e <= 1.96 * sigma->values[i]) ++covered;
  }
  if (errs.empty()) return m;

  m.has_errors = true;
  double sum = 0.0;
  for (double e : errs) sum += e;
  m.mean_err = sum / double(errs.size());

  const std::size_t mid = errs.size() / 2;
  std::nth_element(errs.begin(), errs.begin() + mid, errs.end());
  if (errs.size() % 2 == 1) {
    m.median_err = errs[mid];
  } else {
    const double hi = errs[mid];
    std::nth_element(errs.begin(), errs.begin() + (mid - 1),
                     errs.begin() + mid);
    m.median_err = 0.5 * (errs[mid - 1] + hi);
  }
  if (sigma) m.coverage_rate = double(covered) / double(compared);
  return m;
}

}  // namespace pstereo
