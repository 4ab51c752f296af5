#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pstereo/image.hpp"

namespace pstereo {

// A size x size template cut from the left image, mean-normalized over its
// valid pixels. Sample positions are center + (i - (size-1)/2) on each axis,
// so even sizes sample at half-integer offsets around the center.
struct Patch {
  double cx = 0.0;
  double cy = 0.0;
  int size = 0;
  std::vector<double> values;         // mean-removed; 0 at invalid pixels
  std::vector<std::uint8_t> valid;    // per-pixel sample validity
  double mean = 0.0;                  // mean that was subtracted
  double valid_fraction = 0.0;        // valid samples / size^2
  int valid_count = 0;

  double offset(int i) const { return i - (size - 1) * 0.5; }
};

// Bilinear patch extraction. Samples falling outside the image rectangle or
// on masked-out pixels are marked invalid and excluded from the mean.
// Returns nullopt when no sample is valid.
std::optional<Patch> extract_patch(const GrayImage& img, double cx, double cy,
                                   int size);

}  // namespace pstereo
