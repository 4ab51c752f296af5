#include "doctest.h"

#include <cmath>
#include <numeric>

#include "pstereo/coarse_to_fine.hpp"
#include "pstereo/errors.hpp"

using namespace pstereo;

namespace {

GrayImage shifted_pair_left(int w, int h) {
  GrayImage img = make_gray(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y) = float(0.5 + 0.2 * std::sin(x * 0.37 + 0.8) +
                           0.15 * std::sin(y * 0.29) +
                           0.1 * std::sin((x + y) * 0.143));
  return img;
}

GrayImage shifted_pair_right(int w, int h, double d) {
  GrayImage img = make_gray(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y) = float(0.5 + 0.2 * std::sin((x + d) * 0.37 + 0.8) +
                           0.15 * std::sin(y * 0.29) +
                           0.1 * std::sin((x + d + y) * 0.143));
  return img;
}

PatchEstimate estimate(double cx, double cy, double u, double prob) {
  PatchEstimate e;
  e.cx = cx;
  e.cy = cy;
  e.u = u;
  e.prob = prob;
  e.posterior = prob;
  return e;
}

}  // namespace

TEST_CASE("the published grid on a 20x15 level") {
  const PatchGrid g = make_patch_grid(20, 15, 5, 10, 0.55);
  CHECK(g.stride == 4);  // round(10 * 0.45) rounds the tie 4.5 to even
  REQUIRE(g.xs.size() == 4);
  CHECK(g.xs[0] == 4.5);
  CHECK(g.xs[1] == 8.5);
  CHECK(g.xs[2] == 12.5);
  CHECK(g.xs[3] == 14.5);  // clamped so the last patch ends at the border
  REQUIRE(g.ys.size() == 3);
  CHECK(g.ys[0] == 4.5);
  CHECK(g.ys[1] == 8.5);
  CHECK(g.ys[2] == 9.5);
  REQUIRE(g.centers.size() == 12);
  CHECK(g.centers[0][0] == 4.5);
  CHECK(g.centers[0][1] == 4.5);
  CHECK(g.centers[1][0] == 8.5);  // xs vary fastest
  CHECK(g.centers[1][1] == 4.5);
}

TEST_CASE("zero overlap tiles the level exactly") {
  const PatchGrid g = make_patch_grid(64, 48, 0, 10, 0.0);
  CHECK(g.stride == 10);
  REQUIRE(g.xs.size() == 7);
  CHECK(g.xs[0] == 4.5);
  CHECK(g.xs[5] == 54.5);
  CHECK(g.xs[6] == 58.5);  // clamped so the last column stays covered
}

TEST_CASE("a level of exactly one patch gets a single center") {
  const PatchGrid g = make_patch_grid(10, 10, 0, 10, 0.55);
  REQUIRE(g.xs.size() == 1);
  CHECK(g.xs[0] == 4.5);
  REQUIRE(g.centers.size() == 1);
}

TEST_CASE("levels smaller than a patch are rejected") {
  CHECK_THROWS_AS(make_patch_grid(9, 20, 0, 10, 0.55), DegenerateInputError);
}

TEST_CASE("every pixel is covered by at least one patch") {
  const PatchGrid g = make_patch_grid(37, 23, 0, 10, 0.55);
  std::vector<int> covered(37 * 23, 0);
  for (const auto& c : g.centers) {
    for (int j = 0; j < 10; ++j) {
      for (int i = 0; i < 10; ++i) {
        const int x = int(std::lround(c[0] + (i - 4.5)));
        const int y = int(std::lround(c[1] + (j - 4.5)));
        if (x >= 0 && x < 37 && y >= 0 && y < 23) covered[y * 37 + x] = 1;
      }
    }
  }
  CHECK(std::accumulate(covered.begin(), covered.end(), 0) == 37 * 23);
}

TEST_CASE("level weights double per level and sum to one") {
  const std::vector<int> levels = {5, 4, 3, 2, 1};
  CHECK(level_weight(5, levels) == doctest::Approx(32.0 / 62.0).epsilon(1e-12));
  CHECK(level_weight(1, levels) == doctest::Approx(2.0 / 62.0).epsilon(1e-12));
  double sum = 0.0;
  for (int n : levels) sum += level_weight(n, levels);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<int> single = {3};
  CHECK(level_weight(3, single) == doctest::Approx(1.0));

  const std::vector<int> with_zero = {2, 1, 0};
  CHECK(level_weight(0, with_zero) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(level_weight(2, with_zero) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("probability accumulates down the pyramid and clamps at one") {
  const std::vector<int> levels = {5, 4, 3, 2, 1};
  CHECK(propagate_probability(1.0, 0.0, 5, levels) ==
        doctest::Approx(32.0 / 62.0).epsilon(1e-12));
  CHECK(propagate_probability(1.0, 0.4, 1, levels) ==
        doctest::Approx(0.4 + 2.0 / 62.0).epsilon(1e-12));
  CHECK(propagate_probability(1.0, 0.99, 5, levels) == 1.0);
  CHECK(propagate_probability(0.0, 0.25, 3, levels) == 0.25);
}

TEST_CASE("a single fused patch writes its own disparity and probability") {
  const SpatialMask mask = build_spatial_mask(10, 4.0);
  std::vector<PatchEstimate> patches = {estimate(14.5, 9.5, 3.25, 0.8)};
  const LevelEstimate lvl = fuse_level(std::move(patches), mask, 32, 20, 1, false);
  CHECK(lvl.width == 32);
  CHECK(lvl.height == 20);
  int valid = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (!lvl.disparity.valid_at(x, y)) continue;
      ++valid;
      CHECK(lvl.disparity.at(x, y) == doctest::Approx(3.25).epsilon(1e-12));
      CHECK(lvl.probability.at(x, y) == doctest::Approx(0.8).epsilon(1e-12));
      CHECK(x >= 10);
      CHECK(x <= 19);
      CHECK(y >= 5);
      CHECK(y <= 14);
    }
  }
  CHECK(valid == 100);  // exactly the patch footprint
}

TEST_CASE("overlapping patches blend convexly by probability times mask") {
  const SpatialMask mask = build_spatial_mask(10, 4.0);
  // Same center: mask weights cancel, leaving pure probability weighting
  // 0.8 : 0.2, so u = 0.8*2 + 0.2*3 = 2.2.
  std::vector<PatchEstimate> patches = {estimate(14.5, 9.5, 2.0, 0.8),
                                        estimate(14.5, 9.5, 3.0, 0.2)};
  const LevelEstimate lvl = fuse_level(std::move(patches), mask, 32, 20, 1, false);
  REQUIRE(lvl.disparity.valid_at(14, 9));
  CHECK(lvl.disparity.at(14, 9) == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(lvl.probability.at(14, 9) == doctest::Approx(0.8 * 0.8 + 0.2 * 0.2)
                                         .epsilon(1e-9));

  // Offset centers: between two equal-probability patches the blend moves
  // with the mask ratio but stays within the disparity bracket.
  std::vector<PatchEstimate> two = {estimate(10.5, 9.5, 2.0, 0.5),
                                    estimate(16.5, 9.5, 4.0, 0.5)};
  const LevelEstimate l2 = fuse_level(std::move(two), mask, 32, 20, 1, false);
  for (int x = 12; x <= 15; ++x) {
    REQUIRE(l2.disparity.valid_at(x, 9));
    CHECK(l2.disparity.at(x, 9) > 2.0);
    CHECK(l2.disparity.at(x, 9) < 4.0);
  }
  // Closer to the first center the first patch dominates.
  CHECK(l2.disparity.at(11, 9) < l2.disparity.at(16, 9));
}

TEST_CASE("fusion accumulates normalized variance when requested") {
  const SpatialMask mask = build_spatial_mask(10, 4.0);
  PatchEstimate a = estimate(14.5, 9.5, 2.0, 0.5);
  a.sigma_k = 1.0;
  a.has_sigma = true;
  PatchEstimate b = estimate(14.5, 9.5, 2.0, 0.5);
  b.sigma_k = 2.0;
  b.has_sigma = true;
  const LevelEstimate lvl = fuse_level({a, b}, mask, 32, 20, 1, true);
  REQUIRE(lvl.has_variance);
  REQUIRE(lvl.var_disp.valid_at(14, 9));
  // Equal weights w = 0.5: sum((w/sw)^2 s^2) = 0.25*1 + 0.25*4 = 1.25.
  CHECK(lvl.var_disp.at(14, 9) == doctest::Approx(1.25).epsilon(1e-9));
}

TEST_CASE("pixels no patch covers stay invalid") {
  const SpatialMask mask = build_spatial_mask(10, 4.0);
  std::vector<PatchEstimate> patches = {estimate(4.5, 4.5, 1.0, 0.5)};
  const LevelEstimate lvl = fuse_level(std::move(patches), mask, 64, 48, 1, false);
  CHECK_FALSE(lvl.disparity.valid_at(30, 30));
  CHECK_FALSE(lvl.disparity.valid_at(10, 0));
  CHECK(lvl.disparity.valid_at(0, 0));
}

TEST_CASE("the coarse disparity seeds the next level doubled") {
  ScalarField coarse = ScalarField::sized(4, 3, 3.0, true);
  const ScalarField fine = init_next_level(coarse, 8, 6);
  CHECK(fine.valid_count() == 48);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 8; ++x) CHECK(fine.at(x, y) == 6.0);

  ScalarField checker = ScalarField::sized(2, 1, 0.0, true);
  checker.set(0, 0, 1.0);
  checker.set(1, 0, 2.0);
  const ScalarField up = init_next_level(checker, 4, 2);
  CHECK(up.at(0, 0) == 2.0);
  CHECK(up.at(1, 0) == 2.0);
  CHECK(up.at(2, 0) == 4.0);
  CHECK(up.at(3, 1) == 4.0);
}

TEST_CASE("invalid coarse pixels seed a neutral zero") {
  ScalarField coarse = ScalarField::sized(2, 2, 5.0, false);
  const ScalarField fine = init_next_level(coarse, 4, 4);
  CHECK(fine.valid_count() == 16);  // the seed field is always usable
  for (double v : fine.values) CHECK(v == 0.0);
}

TEST_CASE("upsampling to full resolution scales per halving") {
  ScalarField small = ScalarField::sized(2, 2, 0.0, true);
  small.set(0, 0, 1.0);
  small.set(1, 0, 2.0);
  small.set(0, 1, 3.0);
  small.set(1, 1, 4.0);
  const ScalarField full = upsample_to_full(small, 8, 8, 2, 2.0);
  CHECK(full.at(0, 0) == 4.0);   // 1 * 2^2
  CHECK(full.at(3, 3) == 4.0);   // same source pixel
  CHECK(full.at(4, 0) == 8.0);
  CHECK(full.at(0, 4) == 12.0);
  CHECK(full.at(7, 7) == 16.0);
  CHECK(full.valid_count() == 64);

  // Probabilities upsample unscaled.
  const ScalarField prob = upsample_to_full(small, 8, 8, 2, 1.0);
  CHECK(prob.at(7, 7) == 4.0);

  // exp == 0 passes through untouched.
  const ScalarField same = upsample_to_full(small, 2, 2, 0, 2.0);
  CHECK(same.at(1, 1) == 4.0);
}

TEST_CASE("upsampling preserves invalidity") {
  ScalarField small = ScalarField::sized(2, 2, 1.0, true);
  small.valid[3] = 0;
  const ScalarField full = upsample_to_full(small, 4, 4, 1, 2.0);
  CHECK(full.valid_at(0, 0));
  CHECK_FALSE(full.valid_at(2, 2));
  CHECK_FALSE(full.valid_at(3, 3));
}

TEST_CASE("the full matcher recovers a constant shift on a synthetic pair") {
  const GrayImage left = shifted_pair_left(64, 48);
  const GrayImage right = shifted_pair_right(64, 48, 2.0);
  PipelineConfig cfg;
  cfg.coarsest_exp = 2;
  cfg.finest_exp = 1;
  const MatchResult res = match_stereo(left, right, cfg);

  CHECK(res.disparity.width == 64);
  CHECK(res.disparity.height == 48);
  REQUIRE(res.stats.levels.size() == 2);
  CHECK(res.stats.levels[0].exp == 2);
  CHECK(res.stats.levels[1].exp == 1);
  CHECK(res.stats.levels[0].grid_patches > 0);
  for (const auto& lvl : res.stats.levels) {
    CHECK(lvl.extracted <= lvl.grid_patches);
    CHECK(lvl.converged <= lvl.extracted);
    CHECK(lvl.accepted <= lvl.converged);
    CHECK(lvl.accepted > 0);
  }

  int valid = 0;
  double worst = 0.0;
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (!res.disparity.valid_at(x, y)) continue;
      ++valid;
      worst = std::max(worst, std::fabs(res.disparity.at(x, y) - 2.0));
      CHECK(res.probability.at(x, y) >= 0.0);
      CHECK(res.probability.at(x, y) <= 1.0);
    }
  }
  CHECK(valid > 64 * 48 / 2);
  CHECK(worst < 0.2);
}

TEST_CASE("the matcher is deterministic") {
  const GrayImage left = shifted_pair_left(64, 48);
  const GrayImage right = shifted_pair_right(64, 48, 1.5);
  PipelineConfig cfg;
  cfg.coarsest_exp = 2;
  cfg.finest_exp = 1;
  const MatchResult a = match_stereo(left, right, cfg);
  const MatchResult b = match_stereo(left, right, cfg);
  CHECK(a.disparity.values == b.disparity.values);
  CHECK(a.disparity.valid == b.disparity.valid);
  CHECK(a.probability.values == b.probability.values);
}

TEST_CASE("configuration validation rejects out-of-range values") {
  PipelineConfig cfg;
  CHECK_NOTHROW(validate(cfg));

  PipelineConfig bad = cfg;
  bad.patch_size = 1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.overlap = 1.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.min_iterations = 13;  // above max
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.finest_exp = 6;  // above coarsest
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.window_offsets = {0.5, 0.5};  // duplicate
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.window_offsets = {-0.5, 1.0};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.window_offsets.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.pixel_threshold = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.valid_patch_ratio = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.threads = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.gamma = -0.1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}
