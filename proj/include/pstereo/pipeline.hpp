#pragma once

#include "pstereo/coarse_to_fine.hpp"
#include "pstereo/depth_variance.hpp"

namespace pstereo {

// Matching core output: full-resolution disparity after confidence
// filtering, plus depth (and depth std when variance estimation is on).
struct PipelineOutput {
  ScalarField disparity;
  ScalarField probability;
  DepthResult depth;
  MatchStats stats;
  double runtime_ms = 0.0;  // wall time of the matching core
};

// Runs match_stereo, the confidence filter and the depth conversion, timing
// the whole chain (file I/O and rendering stay outside).
PipelineOutput run_pipeline(const GrayImage& left, const GrayImage& right,
                            const PipelineConfig& cfg,
                            const CameraParams& cam);

}  // namespace pstereo
