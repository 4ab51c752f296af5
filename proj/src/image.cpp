#include "pstereo/image.hpp"

#include <stdexcept>

namespace pstereo {

GrayImage make_gray(int width, int height, float fill, bool valid) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.data.assign(std::size_t(width) * height, fill);
  img.valid.assign(std::size_t(width) * height, valid ? 1 : 0);
  return img;
}

GrayImage to_grayscale(const Raster& raster) {
  if (raster.channels != 1 && raster.channels != 3 && raster.channels != 4) {
    throw std::invalid_argument("to_grayscale: unsupported channel count " +
                                std::to_string(raster.channels));
  }
  GrayImage img = make_gray(raster.width, raster.height);
  const std::size_t n = std::size_t(raster.width) * raster.height;
  constexpr double inv255 = 1.0 / 255.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* px = raster.pixels.data() + i * raster.channels;
    double v;
    bool ok = true;
    switch (raster.channels) {
      case 1:
        v = px[0] * inv255;
        break;
      case 4:
        ok = px[3] != 0;
        [[fallthrough]];
      default:
        v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) * inv255;
        break;
    }
    img.data[i] = static_cast<float>(v);
    img.valid[i] = ok ? 1 : 0;
  }
  return img;
}

}  // namespace pstereo
