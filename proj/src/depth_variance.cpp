#include "pstereo/depth_variance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pstereo {

DepthResult disparity_to_depth(const ScalarField& disparity,
                               const CameraParams& cam,
                               double min_disparity) {
  DepthResult out;
  out.depth = ScalarField::sized(disparity.width, disparity.height);
  const double fb = cam.focal_px * cam.baseline;
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    if (!disparity.valid[i]) continue;
    const double u = disparity.values[i];
    if (!(u >= min_disparity)) continue;
    out.depth.values[i] = fb / u;
    out.depth.valid[i] = 1;
  }
  return out;
}

DepthResult disparity_to_depth(const ScalarField& disparity,
                               const ScalarField& var_disp,
                               const CameraParams& cam,
                               double min_disparity) {
  DepthResult out = disparity_to_depth(disparity, cam, min_disparity);
  out.sigma = ScalarField::sized(disparity.width, disparity.height);
  out.has_sigma = true;
  const double fb = cam.focal_px * cam.baseline;
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    if (!out.depth.valid[i] || !var_disp.valid[i]) continue;
    const double u = disparity.values[i];
    const double sigma_u = std::sqrt(std::max(var_disp.values[i], 0.0));
    out.sigma.values[i] = fb / (u * u) * sigma_u;
    out.sigma.valid[i] = 1;
  }
  return out;
}

std::vector<std::uint8_t> remove_small_components(
    const std::vector<std::uint8_t>& valid, int width, int height,
    long long min_px) {
  std::vector<std::uint8_t> out(valid.size(), 0);
  std::vector<std::uint8_t> seen(valid.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> component;
  for (std::size_t start = 0; start < valid.size(); ++start) {
    if (!valid[start] || seen[start]) continue;
    stack.assign(1, start);
    seen[start] = 1;
    component.clear();
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      component.push_back(idx);
      const int x = int(idx % width);
      const int y = int(idx / width);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= width || ny[k] < 0 || ny[k] >= height)
          continue;
        const std::size_t nidx = std::size_t(ny[k]) * width + nx[k];
        if (!valid[nidx] || seen[nidx]) continue;
        seen[nidx] = 1;
        stack.push_back(nidx);
      }
    }
    if (static_cast<long long>(component.size()) >= min_px)
      for (std::size_t idx : component) out[idx] = 1;
  }
  return out;
}

ScalarField filter_validity(const ScalarField& disparity,
                            const ScalarField& probability, double gamma,
                            double pixel_threshold, int patch_size) {
  ScalarField out = disparity;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.valid[i]) continue;
    if (!probability.valid[i] || probability.values[i] < pixel_threshold)
      out.valid[i] = 0;
  }
  const long long min_px = llround(
      std::ceil(gamma * double(patch_size) * double(patch_size) - 1e-9));
  out.valid = remove_small_components(out.valid, out.width, out.height,
                                      std::max(min_px, 1ll));
  return out;
}

PatchVariance estimate_patch_variance(const WindowSamples& window,
                                      std::span<const double> priors,
                                      double sigma_fallback) {
  PatchVariance out;
  out.sigma_k = sigma_fallback;

  std::vector<double> delta;
  std::vector<double> p;
  double center_prior = 0.0;
  for (std::size_t i = 0; i < window.offsets.size(); ++i) {
    if (!window.valid[i]) continue;
    delta.push_back(window.offsets[i]);
    p.push_back(priors[i]);
    if (int(i) == window.center_index) center_prior = priors[i];
  }
  const std::size_t n = p.size();
  if (n < 3) return out;  // not enough points for a 2-parameter fit

  // A Gaussian bump centered on the window requires the center to be the
  // strict maximum; flat or off-center windows are not Gaussian.
  for (std::size_t i = 0; i < n; ++i) {
    if (delta[i] == 0.0) continue;
    if (!(center_prior > p[i])) return out;
  }

  double c = 1.0;
  double sigma = std::sqrt(0.1);
  for (int iter = 0; iter < kVarianceFitIterations; ++iter) {
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = delta[i] * delta[i];
      const double g = std::exp(-d2 / (2.0 * sigma * sigma));
      const double r = c * g - p[i];
      const double jc = g;                          // d r / d c
      const double js = c * g * d2 / (sigma * sigma * sigma);  // d r / d sigma
      a00 += jc * jc;
      a01 += jc * js;
      a11 += js * js;
      b0 -= jc * r;
      b1 -= js * r;
    }
    // 2x2 Cholesky solve of the normal equations.
    if (!(a00 > 0.0)) return out;
    const double l00 = std::sqrt(a00);
    const double l01 = a01 / l00;
    const double d11 = a11 - l01 * l01;
    if (!(d11 > 1e-300)) return out;  // singular: no curvature information
    const double l11 = std::sqrt(d11);
    const double y0 = b0 / l00;
    const double y1 = (b1 - l01 * y0) / l11;
    const double xs = y1 / l11;
    const double xc = (y0 - l01 * xs) / l00;
    c += xc;
    sigma += xs;
    if (!std::isfinite(c) || !std::isfinite(sigma) || sigma <= 0.0)
      return out;  // diverged
  }

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g =
        std::exp(-delta[i] * delta[i] / (2.0 * sigma * sigma));
    const double r = c * g - p[i];
    ssr += r * r;
  }
  out.fit_residual = std::sqrt(ssr / double(n));
  if (!std::isfinite(out.fit_residual)) return out;
  if (out.fit_residual > kVarianceFitMaxResidual) {
    out.reason = PatchVariance::Reason::residual_too_large;
    return out;
  }
  out.sigma_k = sigma;
  out.c_k = c;
  out.accepted = true;
  out.reason = PatchVariance::Reason::none;
  return out;
}

double propagate_variance(std::span<const double> weights,
                          std::span<const double> sigmas, double u_hat,
                          const CameraParams& cam) {
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (!(wsum > 0.0) || !(u_hat > 0.0)) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double wn = weights[i] / wsum;
    acc += wn * wn * sigmas[i] * sigmas[i];
  }
  const double fb = cam.focal_px * cam.baseline;
  return fb / (u_hat * u_hat) * std::sqrt(acc);
}

}  // namespace pstereo
