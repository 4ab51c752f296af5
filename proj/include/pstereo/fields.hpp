#pragma once

#include <cstdint>
#include <vector>

namespace pstereo {

// Dense per-pixel scalar map (disparity, probability, depth, variance, ...)
// with a validity mask. Values at invalid pixels are meaningless.
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  static ScalarField sized(int w, int h, double value = 0.0,
                           bool valid_flag = false) {
    ScalarField f;
    f.width = w;
    f.height = h;
    f.values.assign(std::size_t(w) * h, value);
    f.valid.assign(std::size_t(w) * h, valid_flag ? 1 : 0);
    return f;
  }

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
  double at(int x, int y) const { return values[index(x, y)]; }
  bool valid_at(int x, int y) const { return valid[index(x, y)] != 0; }
  void set(int x, int y, double v) {
    values[index(x, y)] = v;
    valid[index(x, y)] = 1;
  }
  std::size_t size() const { return values.size(); }
  long long valid_count() const {
    long long n = 0;
    for (auto v : valid) n += (v != 0);
    return n;
  }
};

}  // namespace pstereo
