#include "pstereo/spatial_mask.hpp"

#include "pstereo/fast_exp.hpp"

namespace pstereo {

SpatialMask build_spatial_mask(int size, double sigma_s) {
  SpatialMask mask;
  mask.size = size;
  mask.sigma_s = sigma_s;
  mask.weights.resize(std::size_t(size) * size);
  const double half = (size - 1) * 0.5;
  const double denom = 2.0 * sigma_s * sigma_s;
  for (int j = 0; j < size; ++j) {
    const double dy = j - half;
    for (int i = 0; i < size; ++i) {
      const double dx = i - half;
      mask.weights[std::size_t(j) * size + i] =
          fast_exp(-(dx * dx + dy * dy) / denom);
    }
  }
  return mask;
}

}  // namespace pstereo
