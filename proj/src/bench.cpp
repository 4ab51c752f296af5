#include "pstereo/bench.hpp"

#include <cmath>

#include "pstereo/errors.hpp"
#include "pstereo/metrics.hpp"
#include "pstereo/pipeline.hpp"

namespace pstereo {

BenchResult run_benchmark(std::span<const SceneSpec> scenes,
                          const PipelineConfig& cfg, int repetitions) {
  if (repetitions < 1)
    throw ConfigError("benchmark repetitions must be >= 1");
  if (scenes.empty()) throw ConfigError("benchmark needs at least one scene");

  BenchResult result;
  result.frames.reserve(scenes.size());
  for (const SceneSpec& spec : scenes) {
    const RenderedScene scene = render_scene(spec);
    double total_ms = 0.0;
    PipelineOutput output;
    for (int rep = 0; rep < repetitions; ++rep) {
      output = run_pipeline(scene.left, scene.right, cfg, scene.cam);
      total_ms += output.runtime_ms;
    }
    FrameMetrics m = compute_metrics(
        output.depth.depth, scene.ref_depth,
        output.depth.has_sigma ? &output.depth.sigma : nullptr,
        total_ms / repetitions, spec.name);
    result.frames.push_back(std::move(m));
  }

  // Aggregate row: arithmetic means over frames (NaN-aware for error stats).
  FrameMetrics agg;
  agg.frame = "average";
  double mean_sum = 0.0, median_sum = 0.0, cover_sum = 0.0;
  std::size_t err_n = 0, cover_n = 0;
  double px_sum = 0.0, ms_sum = 0.0;
  for (const FrameMetrics& m : result.frames) {
    if (m.has_errors) {
      mean_sum += m.mean_err;
      median_sum += m.median_err;
      ++err_n;
    }
    if (!std::isnan(m.coverage_rate)) {
      cover_sum += m.coverage_rate;
      ++cover_n;
    }
    px_sum += double(m.valid_px);
    ms_sum += m.runtime_ms;
  }
  if (err_n > 0) {
    agg.mean_err = mean_sum / double(err_n);
    agg.median_err = median_sum / double(err_n);
    agg.has_errors = true;
  }
  if (cover_n > 0) agg.coverage_rate = cover_sum / double(cover_n);
  agg.valid_px = std::size_t(px_sum / double(result.frames.size()) + 0.5);
  agg.runtime_ms = ms_sum / double(result.frames.size());
  result.aggregate = std::move(agg);
  return result;
}

}  // namespace pstereo
