#include "pstereo/coarse_to_fine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "pstereo/depth_variance.hpp"
#include "pstereo/errors.hpp"
#include "pstereo/lk_solver.hpp"
#include "pstereo/patch.hpp"
#include "pstereo/pyramid.hpp"
#include "pstereo/window_posterior.hpp"

namespace pstereo {

void validate(const PipelineConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (cfg.patch_size < 2) fail("patch_size must be >= 2");
  if (cfg.finest_exp < 0) fail("finest_exp must be >= 0");
  if (cfg.coarsest_exp < cfg.finest_exp)
    fail("coarsest_exp must be >= finest_exp");
  if (cfg.coarsest_exp > 16) fail("coarsest_exp is unreasonably large");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0))
    fail("overlap must lie in [0, 1)");
  if (cfg.min_iterations < 1) fail("min_iterations must be >= 1");
  if (cfg.max_iterations < cfg.min_iterations)
    fail("max_iterations must be >= min_iterations");
  if (!(cfg.early_stop_good > 0.0)) fail("early_stop_good must be > 0");
  if (!(cfg.early_stop_bad > 0.0)) fail("early_stop_bad must be > 0");
  if (!(cfg.early_stop_improve >= 0.0)) fail("early_stop_improve must be >= 0");
  if (cfg.window_offsets.empty()) fail("window_offsets must not be empty");
  for (double m : cfg.window_offsets)
    if (!(m > 0.0)) fail("window offsets must be positive magnitudes");
  {
    auto sorted = cfg.window_offsets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("window offsets must be distinct");
  }
  if (!(cfg.sigma_s > 0.0)) fail("sigma_s must be > 0");
  if (!(cfg.pixel_threshold >= 0.0 && cfg.pixel_threshold <= 1.0))
    fail("pixel_threshold must lie in [0, 1]");
  if (!(cfg.gamma >= 0.0)) fail("gamma must be >= 0");
  if (!(cfg.valid_patch_ratio > 0.0 && cfg.valid_patch_ratio <= 1.0))
    fail("valid_patch_ratio must lie in (0, 1]");
  if (cfg.threads < 1) fail("threads must be >= 1");
}

PatchGrid make_patch_grid(int width, int height, int level_exp, int patch_size,
                          double overlap) {
  const double c0 = (patch_size - 1) * 0.5;
  const double cmax_x = (width - 1) - c0;
  const double cmax_y = (height - 1) - c0;
  if (cmax_x < c0 || cmax_y < c0) {
    throw DegenerateInputError(
        "make_patch_grid: level " + std::to_string(width) + "x" +
        std::to_string(height) + " is smaller than one " +
        std::to_string(patch_size) + "px patch");
  }

  PatchGrid grid;
  grid.level_exp = level_exp;
  grid.patch_size = patch_size;
  // Ties round to even (4.5 -> 4), matching the default FP rounding mode.
  grid.stride =
      std::max(1, int(std::lrint(patch_size * (1.0 - overlap))));

  auto axis = [&](double cmax) {
    std::vector<double> v;
    for (int k = 0;; ++k) {
      const double c = c0 + double(k) * grid.stride;
      if (c >= cmax - 1e-9) {
        v.push_back(cmax);  // clamp the last patch onto the border
        break;
      }
      v.push_back(c);
    }
    return v;
  };
  grid.xs = axis(cmax_x);
  grid.ys = axis(cmax_y);
  grid.centers.reserve(grid.xs.size() * grid.ys.size());
  for (double y : grid.ys)
    for (double x : grid.xs) grid.centers.push_back({x, y});
  return grid;
}

double level_weight(int n, std::span<const int> levels) {
  double denom = 0.0;
  for (int m : levels) denom += std::exp2(m);
  return std::exp2(n) / denom;
}

double propagate_probability(double posterior, double inherited, int n,
                             std::span<const int> levels) {
  return std::clamp(inherited + level_weight(n, levels) * posterior, 0.0, 1.0);
}

LevelEstimate fuse_level(std::vector<PatchEstimate> patches,
                         const SpatialMask& mask, int width, int height,
                         int level_exp, bool with_variance) {
  LevelEstimate est;
  est.level_exp = level_exp;
  est.width = width;
  est.height = height;
  est.disparity = ScalarField::sized(width, height);
  est.probability = ScalarField::sized(width, height);
  est.has_variance = with_variance;
  if (with_variance) est.var_disp = ScalarField::sized(width, height);

  const std::size_t n = std::size_t(width) * height;
  std::vector<double> sw(n, 0.0), swu(n, 0.0), swp(n, 0.0);
  std::vector<double> sw2s;
  if (with_variance) sw2s.assign(n, 0.0);

  const int size = mask.size;
  const double half = (size - 1) * 0.5;
  for (const PatchEstimate& pe : patches) {
    for (int j = 0; j < size; ++j) {
      const int y = int(std::lround(pe.cy + (j - half)));
      if (y < 0 || y >= height) continue;
      for (int i = 0; i < size; ++i) {
        const int x = int(std::lround(pe.cx + (i - half)));
        if (x < 0 || x >= width) continue;
        const double w = pe.prob * mask.at(i, j);
        const std::size_t idx = std::size_t(y) * width + x;
        sw[idx] += w;
        swu[idx] += w * pe.u;
        swp[idx] += w * pe.prob;
        if (with_variance) sw2s[idx] += w * w * pe.sigma_k * pe.sigma_k;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (sw[i] <= 0.0) continue;
    est.disparity.values[i] = swu[i] / sw[i];
    est.disparity.valid[i] = 1;
    est.probability.values[i] = swp[i] / sw[i];
    est.probability.valid[i] = 1;
    if (with_variance) {
      est.var_disp.values[i] = sw2s[i] / (sw[i] * sw[i]);
      est.var_disp.valid[i] = 1;
    }
  }
  est.patches = std::move(patches);
  return est;
}

ScalarField init_next_level(const ScalarField& coarse_disparity, int fine_w,
                            int fine_h) {
  ScalarField init = ScalarField::sized(fine_w, fine_h, 0.0, true);
  for (int y = 0; y < fine_h; ++y) {
    const int cy = std::min(y / 2, coarse_disparity.height - 1);
    for (int x = 0; x < fine_w; ++x) {
      const int cx = std::min(x / 2, coarse_disparity.width - 1);
      if (coarse_disparity.valid_at(cx, cy))
        init.values[init.index(x, y)] = 2.0 * coarse_disparity.at(cx, cy);
    }
  }
  return init;
}

ScalarField upsample_to_full(const ScalarField& field, int full_w, int full_h,
                             int exp, double scale_per_level) {
  if (exp == 0) return field;
  ScalarField out = ScalarField::sized(full_w, full_h);
  const double scale = std::pow(scale_per_level, exp);
  for (int y = 0; y < full_h; ++y) {
    const int sy = std::min(y >> exp, field.height - 1);
    for (int x = 0; x < full_w; ++x) {
      const int sx = std::min(x >> exp, field.width - 1);
      if (!field.valid_at(sx, sy)) continue;
      out.set(x, y, scale * field.at(sx, sy));
    }
  }
  return out;
}

namespace {

// Runs fn(i, scratch) for i in [0, n) on `threads` workers. Work items are
// independent and write to distinct slots, so scheduling cannot change the
// result.
template <typename Fn>
void parallel_patches(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    LkScratch scratch;
    for (std::size_t i = 0; i < n; ++i) fn(i, scratch);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    LkScratch scratch;
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      fn(i, scratch);
  };
  std::vector<std::thread> pool;
  const int count = std::min<std::size_t>(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

enum class PatchStage : char { skipped = 0, solved, converged, accepted };

}  // namespace

MatchResult match_stereo(const GrayImage& left, const GrayImage& right,
                         const PipelineConfig& cfg) {
  validate(cfg);
  const Pyramid pyr = build_pyramid(left, right, cfg.coarsest_exp,
                                    cfg.finest_exp, cfg.patch_size);
  const SpatialMask mask = build_spatial_mask(cfg.patch_size, cfg.sigma_s);

  std::vector<int> level_set;
  for (int e = cfg.coarsest_exp; e >= cfg.finest_exp; --e)
    level_set.push_back(e);

  LkParams lk_params;
  lk_params.min_iterations = cfg.min_iterations;
  lk_params.max_iterations = cfg.max_iterations;
  lk_params.stop_good = cfg.early_stop_good;
  lk_params.stop_bad = cfg.early_stop_bad;
  lk_params.stop_improve = cfg.early_stop_improve;

  MatchStats stats;
  ScalarField init;
  bool have_init = false;
  LevelEstimate prev;
  bool have_prev = false;

  for (const PyramidLevel& level : pyr.levels) {
    const int w = level.left.width;
    const int h = level.left.height;
    const bool want_var =
        cfg.estimate_variance && level.exp == cfg.finest_exp;
    const PatchGrid grid =
        make_patch_grid(w, h, level.exp, cfg.patch_size, cfg.overlap);

    const std::size_t count = grid.centers.size();
    std::vector<PatchEstimate> slots(count);
    std::vector<PatchStage> stage(count, PatchStage::skipped);

    parallel_patches(count, cfg.threads, [&](std::size_t i, LkScratch& scratch) {
      const double cx = grid.centers[i][0];
      const double cy = grid.centers[i][1];
      auto patch = extract_patch(level.left, cx, cy, cfg.patch_size);
      if (!patch || patch->valid_fraction < cfg.valid_patch_ratio) return;
      const PatchSystem sys = precompute_patch_system(
          std::move(*patch), level.grad_x, w, h, level.exp);
      if (sys.degenerate) return;
      stage[i] = PatchStage::solved;

      double u0 = 0.0;
      if (have_init) {
        const int ix = std::clamp(int(std::lround(cx)), 0, w - 1);
        const int iy = std::clamp(int(std::lround(cy)), 0, h - 1);
        u0 = init.at(ix, iy);
      }
      const LkResult lk =
          solve_patch_disparity(sys, level.right, u0, lk_params, scratch);
      if (!lk.converged) return;
      stage[i] = PatchStage::converged;

      const auto window =
          sample_window(sys, level.right, lk.u, cfg.window_offsets, scratch);
      if (!window) return;
      const double sigma_r = dynamic_sigma(*window);
      const auto post = patch_posterior(*window, sigma_r, cfg.patch_size);
      if (!post || !post->is_local_minimum) return;

      double inherited = 0.0;
      if (have_prev) {
        const int px =
            std::clamp(int(std::lround(cx / 2.0)), 0, prev.width - 1);
        const int py =
            std::clamp(int(std::lround(cy / 2.0)), 0, prev.height - 1);
        if (prev.probability.valid_at(px, py))
          inherited = prev.probability.at(px, py);
      }

      PatchEstimate pe;
      pe.cx = cx;
      pe.cy = cy;
      pe.u = lk.u;
      pe.posterior = post->probability;
      pe.prob = propagate_probability(post->probability, inherited, level.exp,
                                      level_set);
      if (want_var) {
        const auto priors = window_priors(*window, sigma_r, cfg.patch_size);
        const PatchVariance pv = estimate_patch_variance(*window, priors);
        pe.sigma_k = pv.sigma_k;
        pe.has_sigma = true;
      }
      slots[i] = pe;
      stage[i] = PatchStage::accepted;
    });

    std::vector<PatchEstimate> kept;
    MatchStats::Level ls;
    ls.exp = level.exp;
    ls.grid_patches = int(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (stage[i] >= PatchStage::solved) ++ls.extracted;
      if (stage[i] >= PatchStage::converged) ++ls.converged;
      if (stage[i] == PatchStage::accepted) {
        ++ls.accepted;
        kept.push_back(slots[i]);
      }
    }
    stats.levels.push_back(ls);

    LevelEstimate est =
        fuse_level(std::move(kept), mask, w, h, level.exp, want_var);
    if (level.exp != cfg.finest_exp) {
      const PyramidLevel& next = pyr.level_with_exp(level.exp - 1);
      init = init_next_level(est.disparity, next.left.width,
                             next.left.height);
      have_init = true;
    }
    prev = std::move(est);
    have_prev = true;
  }

  MatchResult result;
  result.disparity = upsample_to_full(prev.disparity, left.width, left.height,
                                      cfg.finest_exp, 2.0);
  result.probability = upsample_to_full(prev.probability, left.width,
                                        left.height, cfg.finest_exp, 1.0);
  if (cfg.estimate_variance) {
    result.var_disp = upsample_to_full(prev.var_disp, left.width, left.height,
                                       cfg.finest_exp, 4.0);
    result.has_variance = true;
  }
  result.finest = std::move(prev);
  result.stats = std::move(stats);
  return result;
}

}  // namespace pstereo
