#include "pstereo/runner.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "pstereo/bench.hpp"
#include "pstereo/errors.hpp"
#include "pstereo/io.hpp"
#include "pstereo/pipeline.hpp"
#include "pstereo/synth.hpp"

namespace pstereo {

void attach_pipeline_flags(CLI::App& app, PipelineConfig& cfg) {
  app.add_option("--coarsest-exp", cfg.coarsest_exp,
                 "Coarsest pyramid level, as a power of two")
      ->capture_default_str();
  app.add_option("--finest-exp", cfg.finest_exp,
                 "Finest matched pyramid level, as a power of two")
      ->capture_default_str();
  app.add_option("--patch-size", cfg.patch_size, "Patch side length, px")
      ->capture_default_str();
  app.add_option("--overlap", cfg.overlap,
                 "Fraction of the patch side shared by neighboring patches")
      ->capture_default_str();
  app.add_option("--min-iterations", cfg.min_iterations,
                 "Solver iterations before early stopping may engage")
      ->capture_default_str();
  app.add_option("--max-iterations", cfg.max_iterations,
                 "Solver iteration cap per patch")
      ->capture_default_str();
  app.add_option("--early-stop-good", cfg.early_stop_good,
                 "Stop as converged below this mean squared residual")
      ->capture_default_str();
  app.add_option("--early-stop-bad", cfg.early_stop_bad,
                 "Give up above this fraction of the template energy")
      ->capture_default_str();
  app.add_option("--early-stop-improve", cfg.early_stop_improve,
                 "Stop when the residual improves less than this fraction")
      ->capture_default_str();
  app.add_option("--window-offsets", cfg.window_offsets,
                 "Disturbance magnitudes for the probability window, px "
                 "(comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--sigma-s", cfg.sigma_s, "Spatial Gaussian std, px")
      ->capture_default_str();
  app.add_option("--pixel-threshold", cfg.pixel_threshold,
                 "Reject pixels whose fused probability is below this")
      ->capture_default_str();
  app.add_option("--gamma", cfg.gamma,
                 "Minimum connected-component area, in patch areas")
      ->capture_default_str();
  app.add_option("--valid-patch-ratio", cfg.valid_patch_ratio,
                 "Minimum fraction of valid pixels per patch")
      ->capture_default_str();
  app.add_flag("--estimate-variance", cfg.estimate_variance,
               "Fit per-patch Gaussians and emit a depth std map");
  app.add_option("--threads", cfg.threads, "Worker threads for the solver")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed,
                 "Seed for synthetic scenes that do not pin their own")
      ->capture_default_str();
}

void build_cli(CLI::App& app, MatchArgs& match_args, BenchArgs& bench_args) {
  app.require_subcommand(1);
  // Goes on the root app (and therefore before the subcommand on the command
  // line); keys live in [match] / [bench] sections. Flags override the file.
  app.set_config("--config", "",
                 "Read options from an INI file with [match] / [bench] "
                 "sections (flags override it)");

  CLI::App* match = app.add_subcommand(
      "match", "Match a rectified stereo pair and write disparity/depth maps");
  match->add_option("left", match_args.left_path, "Left image (PNG/PGM/PPM)")
      ->required();
  match->add_option("right", match_args.right_path, "Right image")->required();
  match
      ->add_option("--calib", match_args.calib_path,
                   "Calibration file: focal_px, baseline_mm, width, height")
      ->required();
  match->add_option("--out-dir", match_args.out_dir, "Output directory")
      ->capture_default_str();
  match->add_option("--frame", match_args.frame,
                    "Label for the metrics row (default: left image stem)");
  attach_pipeline_flags(*match, match_args.cfg);

  CLI::App* bench = app.add_subcommand(
      "bench", "Render synthetic scenes and benchmark the matcher");
  bench->add_option("scenes", bench_args.scene_paths, "Scene description files")
      ->required();
  bench->add_option("--out", bench_args.out_csv, "Metrics CSV path")
      ->capture_default_str();
  bench
      ->add_option("--reps", bench_args.repetitions,
                   "Timing repetitions per scene")
      ->capture_default_str();
  attach_pipeline_flags(*bench, bench_args.cfg);
}

namespace {

int run_guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const DegenerateInputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run_match(const MatchArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    validate(args.cfg);
    auto [left, right] = load_stereo_pair(args.left_path, args.right_path);
    const CalibrationFile calib = load_calibration(args.calib_path);
    if (calib.width != left.width || calib.height != left.height) {
      throw ConfigError("calibration is for " + std::to_string(calib.width) +
                        "x" + std::to_string(calib.height) + ", images are " +
                        std::to_string(left.width) + "x" +
                        std::to_string(left.height));
    }
    const CameraParams cam{calib.focal_px, calib.baseline_mm};
    const PipelineOutput res = run_pipeline(left, right, args.cfg, cam);

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) {
      throw IoError(IoErrorKind::write_failure,
                    "cannot create " + args.out_dir + ": " + ec.message());
    }
    const std::string dir = args.out_dir + "/";
    write_pfm(res.disparity, dir + "disparity.pfm");
    write_pfm(res.depth.depth, dir + "depth.pfm");
    if (res.depth.has_sigma) write_pfm(res.depth.sigma, dir + "sigma.pfm");

    FrameMetrics row;
    row.frame = args.frame.empty()
                    ? std::filesystem::path(args.left_path).stem().string()
                    : args.frame;
    row.valid_px = res.disparity.valid_count();
    row.runtime_ms = res.runtime_ms;
    out << metrics_csv_header() << "\n" << format_metrics_row(row) << "\n";
  });
}

int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    validate(args.cfg);
    std::vector<SceneSpec> scenes;
    scenes.reserve(args.scene_paths.size());
    for (const std::string& path : args.scene_paths) {
      SceneSpec spec = load_scene_spec(path);
      if (!spec.seed_explicit) spec.seed = args.cfg.seed;
      scenes.push_back(std::move(spec));
    }
    const BenchResult res = run_benchmark(scenes, args.cfg, args.repetitions);

    std::vector<FrameMetrics> rows = res.frames;
    rows.push_back(res.aggregate);
    write_metrics_csv(rows, args.out_csv);
    out << metrics_csv_header() << "\n";
    for (const FrameMetrics& row : rows) out << format_metrics_row(row) << "\n";
  });
}

}  // namespace pstereo
