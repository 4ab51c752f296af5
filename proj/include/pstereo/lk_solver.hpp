#pragma once

#include <limits>
#include <vector>

#include "pstereo/image.hpp"
#include "pstereo/patch.hpp"

namespace pstereo {

// Convergence threshold on the disparity update, in level pixels.
inline constexpr double kUpdateEpsilon = 1e-2;
// Below this the 1-D normal-equation "matrix" is treated as singular
// (textureless patch).
inline constexpr double kHessianEpsilon = 1e-8;

// Everything about a template patch that the inverse-compositional solver can
// precompute once: the steepest-descent image (here just the sampled
// horizontal gradient) and its scalar Gauss-Newton Hessian.
struct PatchSystem {
  Patch patch;
  std::vector<double> jacobian;  // gradient sampled at patch pixels; 0 where invalid
  double hessian = 0.0;          // sum of squared jacobian entries
  double template_msq = 0.0;     // mean squared value of the normalized template
  int level_exp = 0;
  bool degenerate = true;        // hessian below kHessianEpsilon
};

PatchSystem precompute_patch_system(Patch patch,
                                    const std::vector<float>& grad_x,
                                    int width, int height, int level_exp,
                                    double hessian_epsilon = kHessianEpsilon);

struct LkParams {
  // The three early-stop heuristics only engage from min_iterations on; with
  // min == max (the published setting) they can act on the final iteration
  // but never truncate a converging solve.
  int min_iterations = 12;
  int max_iterations = 12;
  double update_epsilon = kUpdateEpsilon;
  double stop_good = 0.05;     // residual below this => good enough, converged
  double stop_bad = 0.95;      // residual above this fraction of the template
                               // energy => hopeless, unconverged
  double stop_improve = 0.10;  // relative residual improvement below this
                               // ends the iteration
};

// converged implies iterations <= max_iterations and that the solve ended
// with |update| < update_epsilon, except for the good-enough residual stop
// (reachable only when min_iterations < max_iterations) which accepts the
// current estimate outright.
struct LkResult {
  double u = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
};

// Reusable per-thread buffers for right-patch sampling.
struct LkScratch {
  std::vector<double> samples;
  std::vector<std::uint8_t> sample_valid;
};

// One residual evaluation of the right image against the template at
// disparity u: samples right at (cx + offset - u, cy + offset) following the
// rectified-stereo convention x_right = x_left - d, mean-normalizes over the
// jointly valid pixels, and accumulates the mean squared residual plus the
// jacobian-residual dot product.
struct ResidualEval {
  double msq = std::numeric_limits<double>::infinity();
  double jr = 0.0;  // sum of jacobian[i] * residual[i]
  int n = 0;        // jointly valid pixel count
};

ResidualEval eval_patch_residual(const PatchSystem& sys,
                                 const GrayImage& right, double u,
                                 LkScratch& scratch);

// 1-D inverse-compositional Lucas-Kanade on the epipolar line. The update is
// delta = sum(J*r)/H with r the mean-normalized residual; u moves by +delta.
// Returns immediately unconverged when the patch center shifted by -u_init
// falls outside the right image or the system is degenerate.
LkResult solve_patch_disparity(const PatchSystem& sys, const GrayImage& right,
                               double u_init, const LkParams& params,
                               LkScratch& scratch);

}  // namespace pstereo
