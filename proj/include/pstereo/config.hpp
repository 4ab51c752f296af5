#pragma once

#include <cstdint>
#include <vector>

namespace pstereo {

// All tunables of the matching pipeline with their published defaults.
// Level exponents: level n is the image downsampled by 2^n, so the default
// 5..1 runs from 1/32 to 1/2 resolution and the result is upsampled once more
// to full size.
struct PipelineConfig {
  int coarsest_exp = 5;
  int finest_exp = 1;
  int patch_size = 10;        // patch side length, px
  double overlap = 0.55;      // fraction of patch side shared by neighbors
  int min_iterations = 12;    // early-stop heuristics engage from here on
  int max_iterations = 12;
  double early_stop_good = 0.05;
  double early_stop_bad = 0.95;
  double early_stop_improve = 0.10;
  // Disturbance magnitudes for the probability window; the sampled offsets
  // are the symmetric closure with 0: {-1, -0.5, 0, +0.5, +1} by default.
  std::vector<double> window_offsets = {0.5, 1.0};
  double sigma_s = 4.0;            // spatial Gaussian std, px
  double pixel_threshold = 0.15;   // fused probability below this => invalid
  double gamma = 0.75;             // min connected-component area, in units
                                   // of patch_size^2
  double valid_patch_ratio = 0.75; // min fraction of valid pixels per patch
  bool estimate_variance = false;  // fit per-patch Gaussians, emit depth std
  int threads = 1;
  std::uint64_t seed = 1;          // feeds synthetic scene generation only
};

// Throws ConfigError on out-of-range values (negative sizes, overlap outside
// [0,1), min > max iterations, non-positive offsets, ...).
void validate(const PipelineConfig& cfg);

}  // namespace pstereo
