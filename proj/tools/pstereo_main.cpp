#include <iostream>

#include "CLI11.hpp"
#include "pstereo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Patch-wise probabilistic stereo matcher"};
  pstereo::MatchArgs match_args;
  pstereo::BenchArgs bench_args;
  pstereo::build_cli(app, match_args, bench_args);
  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("match"))
    return pstereo::run_match(match_args, std::cout, std::cerr);
  return pstereo::run_bench(bench_args, std::cout, std::cerr);
}
