#pragma once

#include <array>
#include <span>
#include <vector>

#include "pstereo/config.hpp"
#include "pstereo/fields.hpp"
#include "pstereo/image.hpp"
#include "pstereo/spatial_mask.hpp"

namespace pstereo {

// Patch centers on one pyramid level: a regular lattice with stride
// round(size * (1 - overlap)) (ties to even), first/last centers clamped so
// every patch lies fully in-image and the borders stay covered.
struct PatchGrid {
  int level_exp = 0;
  int patch_size = 0;
  std::vector<double> xs;  // lattice coordinates per axis
  std::vector<double> ys;
  std::vector<std::array<double, 2>> centers;  // row-major xs-fastest
  int stride = 0;
};

// Throws DegenerateInputError when the level is smaller than one patch.
PatchGrid make_patch_grid(int width, int height, int level_exp, int patch_size,
                          double overlap);

// Geometric level weight 2^n normalized over the processed level set.
double level_weight(int n, std::span<const int> levels);

// Probability carried to level n: the inherited coarse probability plus this
// level's posterior scaled by its level weight. Clamped to [0, 1].
double propagate_probability(double posterior, double inherited, int n,
                             std::span<const int> levels);

// A surviving patch after solving, windowing and propagation on one level.
struct PatchEstimate {
  double cx = 0.0;
  double cy = 0.0;
  double u = 0.0;          // converged disparity, level px
  double prob = 0.0;       // propagated probability (fusion weight)
  double posterior = 0.0;  // this level's own window posterior
  double sigma_k = 0.0;    // disparity std from the variance fit, level px
  bool has_sigma = false;
};

// Dense per-level result of probabilistic fusion.
struct LevelEstimate {
  int level_exp = 0;
  int width = 0;
  int height = 0;
  ScalarField disparity;
  ScalarField probability;
  // Fused disparity variance accumulator: sum((w_k/sum w)^2 sigma_k^2).
  ScalarField var_disp;
  bool has_variance = false;
  std::vector<PatchEstimate> patches;
};

// Blends patch disparities into per-pixel estimates with weights
// prob_k * mask(pixel - center). Pixels no surviving patch covers stay
// invalid.
LevelEstimate fuse_level(std::vector<PatchEstimate> patches,
                         const SpatialMask& mask, int width, int height,
                         int level_exp, bool with_variance);

// Nearest-neighbor upsample of a coarse disparity field to the next finer
// level: values double, invalid pixels contribute 0 (a neutral initial
// guess). The result is fully valid by construction.
ScalarField init_next_level(const ScalarField& coarse_disparity, int fine_w,
                            int fine_h);

// Nearest-neighbor upsample across `exp` halvings to full resolution;
// each value is multiplied by scale_per_level once per halving.
ScalarField upsample_to_full(const ScalarField& field, int full_w, int full_h,
                             int exp, double scale_per_level = 1.0);

struct MatchStats {
  struct Level {
    int exp = 0;
    int grid_patches = 0;
    int extracted = 0;   // passed the valid-fraction gate, non-degenerate
    int converged = 0;
    int accepted = 0;    // survived window + local-minimum tests
  };
  std::vector<Level> levels;
};

// Full-resolution matching output (before validity filtering).
struct MatchResult {
  ScalarField disparity;    // px at full resolution
  ScalarField probability;
  ScalarField var_disp;     // disparity variance, px^2 (estimate_variance)
  bool has_variance = false;
  LevelEstimate finest;     // finest processed level, for diagnostics
  MatchStats stats;
};

// Runs the whole coarse-to-fine matcher on a grayscale pair.
MatchResult match_stereo(const GrayImage& left, const GrayImage& right,
                         const PipelineConfig& cfg);

}  // namespace pstereo
