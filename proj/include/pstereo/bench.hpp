#pragma once

#include <span>
#include <vector>

#include "pstereo/config.hpp"
#include "pstereo/metrics.hpp"
#include "pstereo/synth.hpp"

namespace pstereo {

struct BenchResult {
  std::vector<FrameMetrics> frames;
  FrameMetrics aggregate;  // arithmetic means across frames, frame="average"
};

// Renders each scene, runs the pipeline `repetitions` times and reports the
// mean runtime plus depth-error metrics (mm) of the (deterministic) output.
// repetitions must be >= 1.
BenchResult run_benchmark(std::span<const SceneSpec> scenes,
                          const PipelineConfig& cfg, int repetitions);

}  // namespace pstereo
