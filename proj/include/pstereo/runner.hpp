#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pstereo/config.hpp"

namespace CLI {
class App;
}

namespace pstereo {

// Process exit codes shared by both subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;   // bad parameters / calibration
inline constexpr int kExitIoError = 3;       // unreadable or unwritable files
inline constexpr int kExitDegenerate = 4;    // input unusable (too small, ...)

struct MatchArgs {
  std::string left_path;
  std::string right_path;
  std::string calib_path;
  std::string out_dir = "out";
  std::string frame;  // row label; defaults to the left image stem
  PipelineConfig cfg;
};

struct BenchArgs {
  std::vector<std::string> scene_paths;
  std::string out_csv = "metrics.csv";
  int repetitions = 10;
  PipelineConfig cfg;
};

// Registers every pipeline option (one flag per parameter) on the app.
void attach_pipeline_flags(CLI::App& app, PipelineConfig& cfg);

// Builds the full CLI: `match` and `bench` subcommands writing into the
// given argument structs, plus a root-level --config INI hook whose keys
// live in [match] / [bench] sections (command-line flags override it).
void build_cli(CLI::App& app, MatchArgs& match_args, BenchArgs& bench_args);

// Loads the pair + calibration, matches, writes disparity.pfm / depth.pfm
// (plus sigma.pfm with --estimate-variance) into out_dir and prints the
// metrics row to `out`. Returns a process exit code.
int run_match(const MatchArgs& args, std::ostream& out, std::ostream& err);

// Renders the scenes, benchmarks, writes the CSV and echoes it to `out`.
int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace pstereo
