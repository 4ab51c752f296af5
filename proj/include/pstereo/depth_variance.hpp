#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pstereo/fields.hpp"
#include "pstereo/window_posterior.hpp"

namespace pstereo {

// Disparities below this (px) give no meaningful depth and are invalidated.
inline constexpr double kMinDisparity = 0.1;
// Disparity std assigned to patches whose Gaussian fit was rejected, px.
inline constexpr double kSigmaFallback = 2.0;
inline constexpr int kVarianceFitIterations = 10;
// RMS fit residual above this rejects the Gaussian hypothesis.
inline constexpr double kVarianceFitMaxResidual = 0.1;

struct CameraParams {
  double focal_px = 0.0;
  double baseline = 0.0;  // same unit as output depth (mm in the benchmarks)
};

struct DepthResult {
  ScalarField depth;   // focal_px * baseline / disparity
  ScalarField sigma;   // per-pixel depth std, present when has_sigma
  bool has_sigma = false;
};

// Pinhole depth conversion; disparities below min_disparity come out invalid.
DepthResult disparity_to_depth(const ScalarField& disparity,
                               const CameraParams& cam,
                               double min_disparity = kMinDisparity);

// As above, but also first-order-propagates a fused disparity variance field
// (px^2) into a per-pixel depth std: sigma_x = f*b / u^2 * sigma_u.
DepthResult disparity_to_depth(const ScalarField& disparity,
                               const ScalarField& var_disp,
                               const CameraParams& cam,
                               double min_disparity = kMinDisparity);

// Removes 4-connected validity components smaller than min_px pixels.
std::vector<std::uint8_t> remove_small_components(
    const std::vector<std::uint8_t>& valid, int width, int height,
    long long min_px);

// Confidence filter: invalidates pixels whose fused probability is below
// pixel_threshold, then drops surviving islands smaller than
// gamma * patch_size^2 pixels. Returns the disparity field with the tightened
// validity mask.
ScalarField filter_validity(const ScalarField& disparity,
                            const ScalarField& probability, double gamma,
                            double pixel_threshold, int patch_size);

// Gauss-Newton fit of c * exp(-offset^2 / (2 sigma^2)) to the window priors.
struct PatchVariance {
  enum class Reason { none, residual_too_large, not_gaussian };
  double sigma_k = kSigmaFallback;  // fallback unless accepted
  double c_k = 0.0;    // fitted peak weight; a fit scale, not a calibrated
                       // density height (the priors are renormalized weights)
  bool accepted = false;
  Reason reason = Reason::not_gaussian;
  double fit_residual = 0.0;  // RMS over the valid window samples
};

// priors[i] pairs with window.offsets[i]; invalid samples are skipped.
// Rejects with not_gaussian when the center prior is not the strict maximum
// or the fit diverges, and with residual_too_large when the converged fit
// misses the samples by more than kVarianceFitMaxResidual RMS.
PatchVariance estimate_patch_variance(const WindowSamples& window,
                                      std::span<const double> priors,
                                      double sigma_fallback = kSigmaFallback);

// First-order uncertainty propagation of fused patch disparities into depth:
// sigma_x^2 = (f b)^2 / u^4 * sum(normalized_w_k^2 * sigma_k^2). Returns the
// depth std in baseline units.
double propagate_variance(std::span<const double> weights,
                          std::span<const double> sigmas, double u_hat,
                          const CameraParams& cam);

}  // namespace pstereo
