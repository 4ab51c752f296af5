#pragma once

#include <vector>

namespace pstereo {

// Isotropic Gaussian weights over the patch footprint, indexed like patch
// pixels (offset (i,j) - (size-1)/2 from the patch center). Computed with the
// fast exponential, so values carry its ~4% error; for even sizes the four
// innermost pixels share the maximum.
struct SpatialMask {
  int size = 0;
  double sigma_s = 0.0;
  std::vector<double> weights;  // size * size, row-major

  double at(int ix, int iy) const {
    return weights[std::size_t(iy) * size + ix];
  }
};

SpatialMask build_spatial_mask(int size, double sigma_s);

}  // namespace pstereo
