#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pstereo/lk_solver.hpp"

namespace pstereo {

// Lower bound for the residual spread so the Boltzmann exponent stays finite
// on windows with near-identical residuals.
inline constexpr double kSigmaFloor = 1e-4;

// Mean-squared residuals of the right patch sampled at u_k + offset for a
// symmetric set of disturbance offsets around the converged disparity.
struct WindowSamples {
  std::vector<double> offsets;         // ascending, includes 0
  std::vector<double> residuals;       // mean squared, one per offset
  std::vector<std::uint8_t> valid;     // sample usable?
  int center_index = 0;                // position of offset 0

  int valid_count() const {
    int n = 0;
    for (auto v : valid) n += (v != 0);
    return n;
  }
};

// Evaluates the residual window. positive_offsets lists the disturbance
// magnitudes (e.g. {0.5, 1}); the sampled set is the symmetric closure with
// 0. A sample is invalid when any template-valid pixel leaves the right
// image or lands on masked-out pixels. Returns nullopt (patch dropped) when
// more than one sample is invalid or the center sample is.
std::optional<WindowSamples> sample_window(
    const PatchSystem& sys, const GrayImage& right, double u_k,
    std::span<const double> positive_offsets, LkScratch& scratch);

// Population standard deviation of the valid residual samples, floored.
double dynamic_sigma(const WindowSamples& window,
                     double sigma_floor = kSigmaFloor);

// Unnormalized Boltzmann weights exp(-residual / (2 sigma_r^2 s^2)) per
// sample; invalid samples get 0.
std::vector<double> window_priors(const WindowSamples& window, double sigma_r,
                                  int patch_size, bool use_fast_exp = true);

struct PatchPosterior {
  double probability = 0.0;      // center weight / sum of valid weights
  double sigma_r = 0.0;          // spread used for the weights
  bool is_local_minimum = false; // center residual strictly below all others
};

// Normalized posterior of the converged disparity within its window.
// Returns nullopt when every weight underflows to zero. Callers discard
// patches whose center is not the strict window minimum.
std::optional<PatchPosterior> patch_posterior(const WindowSamples& window,
                                              double sigma_r, int patch_size,
                                              bool use_fast_exp = true);

}  // namespace pstereo
