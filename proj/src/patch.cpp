#include "pstereo/patch.hpp"

namespace pstereo {

std::optional<Patch> extract_patch(const GrayImage& img, double cx, double cy,
                                   int size) {
  Patch p;
  p.cx = cx;
  p.cy = cy;
  p.size = size;
  const std::size_t n = std::size_t(size) * size;
  p.values.resize(n);
  p.valid.resize(n);

  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < size; ++j) {
    const double y = cy + p.offset(j);
    for (int i = 0; i < size; ++i) {
      const BilinearSample s = sample_bilinear(img, cx + p.offset(i), y);
      const std::size_t idx = std::size_t(j) * size + i;
      p.values[idx] = s.value;
      p.valid[idx] = s.valid ? 1 : 0;
      if (s.valid) {
        sum += s.value;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;

  p.mean = sum / count;
  p.valid_count = count;
  p.valid_fraction = double(count) / double(n);
  for (std::size_t i = 0; i < n; ++i)
    p.values[i] = p.valid[i] ? p.values[i] - p.mean : 0.0;
  return p;
}

}  // namespace pstereo
