#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace pstereo {

// 8-bit raster as it comes out of a decoder. channels: 1 = gray, 3 = RGB,
// 4 = RGBA (alpha acts as a validity mask).
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved
};

// Single-channel float image with intensities in [0,1] and a per-pixel
// validity mask. All matching math runs on this type.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;           // row-major
  std::vector<std::uint8_t> valid;   // 1 = usable

  float at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  float& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  bool valid_at(int x, int y) const {
    return valid[std::size_t(y) * width + x] != 0;
  }
  // True when (x, y) lies inside the sampling rectangle [0,w-1]x[0,h-1].
  bool in_bounds(double x, double y) const {
    return x >= 0.0 && x <= width - 1.0 && y >= 0.0 && y <= height - 1.0;
  }
};

GrayImage make_gray(int width, int height, float fill = 0.0f,
                    bool valid = true);

// Rec.601 luma on [0,1]. RGBA input marks alpha == 0 pixels invalid; gray and
// RGB inputs come back fully valid.
GrayImage to_grayscale(const Raster& raster);

struct BilinearSample {
  double value = 0.0;
  bool valid = false;
};

// Bilinear interpolation with clamp-to-border reads. The sample is valid only
// if the position is inside the image rectangle and all four source pixels
// are valid.
inline BilinearSample sample_bilinear(const GrayImage& img, double x,
                                      double y) {
  const bool inside = img.in_bounds(x, y);
  const double cx = std::clamp(x, 0.0, double(img.width - 1));
  const double cy = std::clamp(y, 0.0, double(img.height - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
  const double bot = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
  BilinearSample s;
  s.value = (1.0 - fy) * top + fy * bot;
  s.valid = inside && img.valid_at(x0, y0) && img.valid_at(x1, y0) &&
            img.valid_at(x0, y1) && img.valid_at(x1, y1);
  return s;
}

// Bilinear read of a raw scalar plane (used for gradient fields); clamps at
// the border and carries no validity.
inline double sample_plane_bilinear(const float* plane, int width, int height,
                                    double x, double y) {
  const double cx = std::clamp(x, 0.0, double(width - 1));
  const double cy = std::clamp(y, 0.0, double(height - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * plane[std::size_t(y0) * width + x0] +
                     fx * plane[std::size_t(y0) * width + x1];
  const double bot = (1.0 - fx) * plane[std::size_t(y1) * width + x0] +
                     fx * plane[std::size_t(y1) * width + x1];
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace pstereo
