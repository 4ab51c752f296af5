#include "pstereo/pipeline.hpp"

#include <chrono>

#include "pstereo/depth_variance.hpp"

namespace pstereo {

PipelineOutput run_pipeline(const GrayImage& left, const GrayImage& right,
                            const PipelineConfig& cfg,
                            const CameraParams& cam) {
  PipelineOutput out;
  const auto t0 = std::chrono::steady_clock::now();

  MatchResult match = match_stereo(left, right, cfg);
  ScalarField filtered =
      filter_validity(match.disparity, match.probability, cfg.gamma,
                      cfg.pixel_threshold, cfg.patch_size);
  // Probability mirrors the filtered validity so downstream consumers see a
  // consistent mask.
  ScalarField probability = match.probability;
  probability.valid = filtered.valid;

  DepthResult depth =
      match.has_variance
          ? disparity_to_depth(filtered, match.var_disp, cam)
          : disparity_to_depth(filtered, cam);

  const auto t1 = std::chrono::steady_clock::now();
  out.runtime_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.disparity = std::move(filtered);
  out.probability = std::move(probability);
  out.depth = std::move(depth);
  out.stats = std::move(match.stats);
  return out;
}

}  // namespace pstereo
