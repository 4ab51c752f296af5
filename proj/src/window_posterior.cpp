#include "pstereo/window_posterior.hpp"

#include <algorithm>
#include <cmath>

#include "pstereo/fast_exp.hpp"

namespace pstereo {

std::optional<WindowSamples> sample_window(
    const PatchSystem& sys, const GrayImage& right, double u_k,
    std::span<const double> positive_offsets, LkScratch& scratch) {
  std::vector<double> mags(positive_offsets.begin(), positive_offsets.end());
  std::sort(mags.begin(), mags.end());

  WindowSamples w;
  w.offsets.reserve(2 * mags.size() + 1);
  for (auto it = mags.rbegin(); it != mags.rend(); ++it)
    w.offsets.push_back(-*it);
  w.center_index = static_cast<int>(w.offsets.size());
  w.offsets.push_back(0.0);
  for (double m : mags) w.offsets.push_back(m);

  const std::size_t n = w.offsets.size();
  w.residuals.resize(n);
  w.valid.resize(n);
  int invalid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ResidualEval ev =
        eval_patch_residual(sys, right, u_k + w.offsets[i], scratch);
    // Comparable residuals need the full template; losing pixels off the
    // image edge (or onto masked-out ones) invalidates the sample.
    const bool ok = ev.n == sys.patch.valid_count;
    w.residuals[i] = ev.msq;
    w.valid[i] = ok ? 1 : 0;
    if (!ok) ++invalid;
  }
  if (invalid > 1 || !w.valid[w.center_index]) return std::nullopt;
  return w;
}

double dynamic_sigma(const WindowSamples& window, double sigma_floor) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < window.residuals.size(); ++i) {
    if (!window.valid[i]) continue;
    sum += window.residuals[i];
    ++count;
  }
  if (count == 0) return sigma_floor;
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t i = 0; i < window.residuals.size(); ++i) {
    if (!window.valid[i]) continue;
    const double d = window.residuals[i] - mean;
    ss += d * d;
  }
  return std::max(std::sqrt(ss / count), sigma_floor);
}

std::vector<double> window_priors(const WindowSamples& window, double sigma_r,
                                  int patch_size, bool use_fast_exp) {
  const double denom =
      2.0 * sigma_r * sigma_r * double(patch_size) * double(patch_size);
  std::vector<double> priors(window.residuals.size(), 0.0);
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (!window.valid[i]) continue;
    const double e = -window.residuals[i] / denom;
    priors[i] = use_fast_exp ? fast_exp(e) : std::exp(e);
  }
  return priors;
}

std::optional<PatchPosterior> patch_posterior(const WindowSamples& window,
                                              double sigma_r, int patch_size,
                                              bool use_fast_exp) {
  const std::vector<double> priors =
      window_priors(window, sigma_r, patch_size, use_fast_exp);
  double denom = 0.0;
  for (double p : priors) denom += p;
  if (denom <= 0.0) return std::nullopt;  // every weight underflowed

  PatchPosterior post;
  post.probability = priors[window.center_index] / denom;
  post.sigma_r = sigma_r;
  post.is_local_minimum = true;
  const double center = window.residuals[window.center_index];
  for (std::size_t i = 0; i < window.residuals.size(); ++i) {
    if (int(i) == window.center_index || !window.valid[i]) continue;
    if (!(center < window.residuals[i])) {
      post.is_local_minimum = false;
      break;
    }
  }
  return post;
}

}  // namespace pstereo
