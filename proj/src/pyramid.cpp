#include "pstereo/pyramid.hpp"

#include <string>

#include "pstereo/errors.hpp"

namespace pstereo {

GrayImage downsample_half(const GrayImage& img) {
  const int w = (img.width + 1) / 2;
  const int h = (img.height + 1) / 2;
  GrayImage out = make_gray(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, img.height - 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, img.width - 1);
      out.at(x, y) =
          0.25f * (img.at(x0, y0) + img.at(x1, y0) + img.at(x0, y1) +
                   img.at(x1, y1));
      out.valid[std::size_t(y) * w + x] =
          img.valid_at(x0, y0) && img.valid_at(x1, y0) &&
          img.valid_at(x0, y1) && img.valid_at(x1, y1);
    }
  }
  return out;
}

std::vector<float> gradient_x(const GrayImage& img) {
  std::vector<float> grad(std::size_t(img.width) * img.height, 0.0f);
  if (img.width < 2) return grad;
  for (int y = 0; y < img.height; ++y) {
    float* row = grad.data() + std::size_t(y) * img.width;
    row[0] = img.at(1, y) - img.at(0, y);
    for (int x = 1; x < img.width - 1; ++x)
      row[x] = 0.5f * (img.at(x + 1, y) - img.at(x - 1, y));
    row[img.width - 1] =
        img.at(img.width - 1, y) - img.at(img.width - 2, y);
  }
  return grad;
}

Pyramid build_pyramid(const GrayImage& left, const GrayImage& right,
                      int coarsest_exp, int finest_exp, int min_patch) {
  if (left.width != right.width || left.height != right.height) {
    throw DegenerateInputError("build_pyramid: left is " +
                               std::to_string(left.width) + "x" +
                               std::to_string(left.height) + " but right is " +
                               std::to_string(right.width) + "x" +
                               std::to_string(right.height));
  }
  if (finest_exp < 0 || coarsest_exp < finest_exp) {
    throw DegenerateInputError("build_pyramid: bad level range " +
                               std::to_string(coarsest_exp) + ".." +
                               std::to_string(finest_exp));
  }

  // Halve down to the finest requested level, then keep halving while
  // recording the requested range. ceil-halving composes, so level n is
  // ceil(W / 2^n) x ceil(H / 2^n) exactly.
  std::vector<PyramidLevel> levels(std::size_t(coarsest_exp - finest_exp) + 1);
  GrayImage l = left;
  GrayImage r = right;
  for (int e = 1; e <= coarsest_exp; ++e) {
    l = downsample_half(l);
    r = downsample_half(r);
    if (e >= finest_exp) {
      PyramidLevel& lvl = levels[std::size_t(coarsest_exp - e)];
      lvl.exp = e;
      lvl.left = l;
      lvl.right = r;
    }
  }
  if (finest_exp == 0) {
    PyramidLevel& lvl = levels.back();
    lvl.exp = 0;
    lvl.left = left;
    lvl.right = right;
  }
  for (PyramidLevel& lvl : levels) lvl.grad_x = gradient_x(lvl.left);

  const PyramidLevel& coarsest = levels.front();
  if (coarsest.left.width < min_patch || coarsest.left.height < min_patch) {
    throw DegenerateInputError(
        "build_pyramid: coarsest level " + std::to_string(coarsest.left.width) +
        "x" + std::to_string(coarsest.left.height) +
        " is smaller than one patch (" + std::to_string(min_patch) + ")");
  }

  Pyramid pyr;
  pyr.coarsest_exp = coarsest_exp;
  pyr.finest_exp = finest_exp;
  pyr.levels = std::move(levels);
  return pyr;
}

}  // namespace pstereo
