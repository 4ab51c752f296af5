#include "pstereo/lk_solver.hpp"

#include <cmath>

namespace pstereo {

PatchSystem precompute_patch_system(Patch patch,
                                    const std::vector<float>& grad_x,
                                    int width, int height, int level_exp,
                                    double hessian_epsilon) {
  PatchSystem sys;
  sys.level_exp = level_exp;
  const int size = patch.size;
  const std::size_t n = std::size_t(size) * size;
  sys.jacobian.assign(n, 0.0);

  double hess = 0.0;
  double tsq = 0.0;
  for (int j = 0; j < size; ++j) {
    const double y = patch.cy + patch.offset(j);
    for (int i = 0; i < size; ++i) {
      const std::size_t idx = std::size_t(j) * size + i;
      if (!patch.valid[idx]) continue;
      const double g = sample_plane_bilinear(grad_x.data(), width, height,
                                             patch.cx + patch.offset(i), y);
      sys.jacobian[idx] = g;
      hess += g * g;
      tsq += patch.values[idx] * patch.values[idx];
    }
  }
  sys.hessian = hess;
  sys.template_msq = patch.valid_count > 0 ? tsq / patch.valid_count : 0.0;
  sys.degenerate = !(hess >= hessian_epsilon) || !std::isfinite(hess);
  sys.patch = std::move(patch);
  return sys;
}

ResidualEval eval_patch_residual(const PatchSystem& sys,
                                 const GrayImage& right, double u,
                                 LkScratch& scratch) {
  const Patch& p = sys.patch;
  const int size = p.size;
  const std::size_t n = std::size_t(size) * size;
  scratch.samples.resize(n);
  scratch.sample_valid.assign(n, 0);

  // First pass: sample the right patch and take its mean over the pixels
  // valid in both images, mirroring the template normalization.
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < size; ++j) {
    const double y = p.cy + p.offset(j);
    for (int i = 0; i < size; ++i) {
      const std::size_t idx = std::size_t(j) * size + i;
      if (!p.valid[idx]) continue;
      const BilinearSample s =
          sample_bilinear(right, p.cx + p.offset(i) - u, y);
      if (!s.valid) continue;
      scratch.samples[idx] = s.value;
      scratch.sample_valid[idx] = 1;
      sum += s.value;
      ++count;
    }
  }
  ResidualEval ev;
  ev.n = count;
  if (count == 0) return ev;

  const double mean = sum / count;
  double ssr = 0.0;
  double jr = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (!scratch.sample_valid[idx]) continue;
    const double r = (scratch.samples[idx] - mean) - p.values[idx];
    ssr += r * r;
    jr += sys.jacobian[idx] * r;
  }
  ev.msq = ssr / count;
  ev.jr = jr;
  return ev;
}

LkResult solve_patch_disparity(const PatchSystem& sys, const GrayImage& right,
                               double u_init, const LkParams& params,
                               LkScratch& scratch) {
  LkResult res;
  res.u = u_init;
  if (sys.degenerate) return res;
  if (!right.in_bounds(sys.patch.cx - u_init, sys.patch.cy)) return res;

  double u = u_init;
  double prev = std::numeric_limits<double>::infinity();
  double last_delta = 0.0;
  bool updated = false;
  int it = 1;
  for (; it <= params.max_iterations; ++it) {
    const ResidualEval ev = eval_patch_residual(sys, right, u, scratch);
    if (ev.n == 0) {
      res.u = u;
      res.iterations = it;
      return res;
    }
    const double r = ev.msq;
    if (it >= params.min_iterations) {
      if (r < params.stop_good) {  // good enough
        res.converged = true;
        break;
      }
      if (r > params.stop_bad * sys.template_msq) {  // hopeless
        break;
      }
      if (std::isfinite(prev) && (prev - r) < params.stop_improve * prev) {
        // Plateaued; convergence is still judged by the update magnitude.
        res.converged = updated && std::abs(last_delta) < params.update_epsilon;
        break;
      }
    }
    const double delta = ev.jr / sys.hessian;
    u += delta;
    last_delta = delta;
    updated = true;
    prev = r;
    if (std::abs(delta) < params.update_epsilon) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(it, params.max_iterations);
  res.u = u;
  res.final_residual = eval_patch_residual(sys, right, u, scratch).msq;
  return res;
}

}  // namespace pstereo
