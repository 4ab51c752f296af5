#pragma once

#include <vector>

#include "pstereo/image.hpp"

namespace pstereo {

// One resolution level of the stereo pair. `exp` is the downsampling
// exponent: the level measures ceil(W / 2^exp) x ceil(H / 2^exp).
struct PyramidLevel {
  int exp = 0;
  GrayImage left;
  GrayImage right;
  std::vector<float> grad_x;  // horizontal gradient of the left image
};

// Levels ordered coarsest first (descending exp).
struct Pyramid {
  int coarsest_exp = 0;
  int finest_exp = 0;
  std::vector<PyramidLevel> levels;

  const PyramidLevel& level_with_exp(int exp) const {
    return levels[std::size_t(coarsest_exp - exp)];
  }
};

// 2x2 box filter with clamped (edge-duplicating) reads; output dims are
// ceil(w/2) x ceil(h/2). A downsampled pixel is invalid if any source pixel
// under its footprint is invalid.
GrayImage downsample_half(const GrayImage& img);

// Horizontal central differences, one-sided at the left/right borders.
std::vector<float> gradient_x(const GrayImage& img);

// Builds levels coarsest_exp..finest_exp for both images. Throws
// DegenerateInputError when the images differ in size or when the coarsest
// level is smaller than min_patch in either dimension.
Pyramid build_pyramid(const GrayImage& left, const GrayImage& right,
                      int coarsest_exp, int finest_exp, int min_patch = 1);

}  // namespace pstereo
