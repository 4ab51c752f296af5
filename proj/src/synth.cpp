#include "pstereo/synth.hpp"

#include <algorithm>
#include <cmath>

#include "pstereo/errors.hpp"
#include "pstereo/kv.hpp"

namespace pstereo {

// ---------------------------------------------------------------------------
// deterministic noise

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1), keyed by three integers. Platform-independent.
double hash_unit(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t h = splitmix(a ^ splitmix(b ^ splitmix(c)));
  return double(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

double gaussian_noise(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index) {
  // Box-Muller on two keyed uniforms; hand-rolled so the sequence is
  // identical on every platform.
  const double u1 = 1.0 - hash_unit(seed, stream * 2 + 1, index);  // (0, 1]
  const double u2 = hash_unit(seed, stream * 2 + 2, index);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

double value_noise(double x, double y, std::uint64_t seed, int octaves,
                   double base_scale) {
  double sum = 0.0;
  double norm = 0.0;
  double amp = 1.0;
  double wavelength = base_scale;
  for (int o = 0; o < octaves; ++o) {
    const double gx = x / wavelength;
    const double gy = y / wavelength;
    const double fx = std::floor(gx);
    const double fy = std::floor(gy);
    const auto ix = std::int64_t(fx);
    const auto iy = std::int64_t(fy);
    const double tx = smoothstep(gx - fx);
    const double ty = smoothstep(gy - fy);
    const std::uint64_t os = splitmix(seed + std::uint64_t(o));
    const double v00 = hash_unit(os, std::uint64_t(ix), std::uint64_t(iy));
    const double v10 = hash_unit(os, std::uint64_t(ix + 1), std::uint64_t(iy));
    const double v01 = hash_unit(os, std::uint64_t(ix), std::uint64_t(iy + 1));
    const double v11 =
        hash_unit(os, std::uint64_t(ix + 1), std::uint64_t(iy + 1));
    const double v = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) +
                     ty * ((1.0 - tx) * v01 + tx * v11);
    sum += amp * v;
    norm += amp;
    amp *= 0.5;
    wavelength *= 0.5;
  }
  return sum / norm;
}

// ---------------------------------------------------------------------------
// scene geometry

namespace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

double reference_depth(const SceneSpec& s) {
  const double fb = s.focal_px * s.baseline;
  switch (s.surface) {
    case SurfaceKind::plane:
      return fb / s.disparity;
    case SurfaceKind::slanted_plane:
      return fb / s.disparity0;
    case SurfaceKind::sphere:
      return s.background_depth;
  }
  return fb / s.disparity;
}

// Ray through left pixel (x, y): origin 0, direction ((x-cx)/f, (y-cy)/f, 1).
Vec3 pixel_ray(const SceneSpec& s, double x, double y) {
  return {(x - 0.5 * (s.width - 1)) / s.focal_px,
          (y - 0.5 * (s.height - 1)) / s.focal_px, 1.0};
}

// Depth of the sphere surface along the ray, or a negative value on miss.
double sphere_hit(const SceneSpec& s, const Vec3& d) {
  const double zc = s.sphere_depth + s.sphere_radius;
  const double dd = d.x * d.x + d.y * d.y + d.z * d.z;
  const double dc = d.z * zc;  // dot(d, center), center = (0, 0, zc)
  const double disc = dc * dc - dd * (zc * zc - s.sphere_radius * s.sphere_radius);
  if (disc < 0.0) return -1.0;
  const double t = (dc - std::sqrt(disc)) / dd;  // nearest intersection
  if (t <= 0.0) return -1.0;
  return t * d.z;
}

}  // namespace

double scene_depth_at(const SceneSpec& spec, double x, double y) {
  const double fb = spec.focal_px * spec.baseline;
  switch (spec.surface) {
    case SurfaceKind::plane:
      return fb / spec.disparity;
    case SurfaceKind::slanted_plane:
      return fb / (spec.disparity0 + spec.disparity_gradient * x);
    case SurfaceKind::sphere: {
      const double z = sphere_hit(spec, pixel_ray(spec, x, y));
      return z > 0.0 ? z : spec.background_depth;
    }
  }
  return fb / spec.disparity;
}

double scene_disparity_at(const SceneSpec& spec, double x, double y) {
  return spec.focal_px * spec.baseline / scene_depth_at(spec, x, y);
}

namespace {

double texture_at(const SceneSpec& s, double wx, double wy) {
  // texture_scale is a wavelength in pixels at the reference depth; convert
  // to world units so the pattern sticks to the surface.
  const double wavelength =
      s.texture_scale * reference_depth(s) / s.focal_px;
  switch (s.texture) {
    case TextureKind::perlin: {
      const double t =
          value_noise(wx / wavelength * s.texture_scale,
                      wy / wavelength * s.texture_scale, s.seed,
                      s.texture_octaves, s.texture_scale);
      return 0.1 + 0.8 * t;
    }
    case TextureKind::checker: {
      const auto cx = std::int64_t(std::floor(wx / wavelength));
      const auto cy = std::int64_t(std::floor(wy / wavelength));
      return ((cx + cy) & 1) ? 0.8 : 0.2;
    }
    case TextureKind::constant:
      return 0.5;
  }
  return 0.5;
}

// cos of the angle between the surface normal and the viewing axis.
double facing_cos(const SceneSpec& s, double x, double y, double z) {
  switch (s.surface) {
    case SurfaceKind::plane:
      return 1.0;
    case SurfaceKind::slanted_plane: {
      // Surface point P(x) = ((x-cx) z(x) / f, ..., z(x)); the normal lies in
      // the xz-plane. With a = dX/dx and c = dz/dx, cos = a / sqrt(a^2 + c^2).
      const double d = s.disparity0 + s.disparity_gradient * x;
      const double fb = s.focal_px * s.baseline;
      const double dzdx = -fb * s.disparity_gradient / (d * d);
      const double xc = x - 0.5 * (s.width - 1);
      const double a = z / s.focal_px + xc / s.focal_px * dzdx;
      return std::max(0.0, a / std::sqrt(a * a + dzdx * dzdx));
    }
    case SurfaceKind::sphere: {
      const Vec3 ray = pixel_ray(s, x, y);
      const double zhit = sphere_hit(s, ray);
      if (zhit <= 0.0) return 1.0;  // background plane
      const double zc = s.sphere_depth + s.sphere_radius;
      const Vec3 p{ray.x / ray.z * zhit, ray.y / ray.z * zhit, zhit};
      const double nz = (p.z - zc) / s.sphere_radius;
      return std::max(0.0, -nz);  // surface facing the camera
    }
  }
  return 1.0;
}

}  // namespace

double scene_intensity_at(const SceneSpec& spec, double x, double y) {
  const double z = scene_depth_at(spec, x, y);
  const Vec3 ray = pixel_ray(spec, x, y);
  const double wx = ray.x * z;
  const double wy = ray.y * z;
  double v = texture_at(spec, wx, wy);
  const double cosa = facing_cos(spec, x, y, z);
  v *= spec.ambient + (1.0 - spec.ambient) * cosa;
  if (spec.shading == ShadingKind::nonlambertian) {
    // Specular washout: blend toward white where the surface faces the
    // camera. Identical in both views, so only the texture contrast suffers.
    const double h =
        spec.highlight_strength * std::pow(cosa, spec.highlight_falloff);
    v = v * (1.0 - h) + h * 0.95;
  }
  return std::clamp(v, 0.0, 1.0);
}

RenderedScene render_scene(const SceneSpec& spec) {
  RenderedScene out;
  out.spec = spec;
  out.cam = CameraParams{spec.focal_px, spec.baseline};
  const int w = spec.width;
  const int h = spec.height;
  out.left = make_gray(w, h);
  out.right = make_gray(w, h);
  out.ref_disparity = ScalarField::sized(w, h, 0.0, true);
  out.ref_depth = ScalarField::sized(w, h, 0.0, true);

  // Upper bound on any disparity reachable from a right pixel (the candidate
  // left pixels run up to x + dmax, slightly past the image for slanted
  // surfaces), so that F(dmax) > 0 everywhere in the inverse-warp search.
  const double fb = spec.focal_px * spec.baseline;
  double dmax = 0.0;
  switch (spec.surface) {
    case SurfaceKind::plane:
      dmax = spec.disparity + 1.0;
      break;
    case SurfaceKind::slanted_plane: {
      const double g = spec.disparity_gradient;
      if (g > 0.0)
        dmax = (spec.disparity0 + g * (w - 1) + 1.0) / (1.0 - g);
      else
        dmax = spec.disparity0 + 1.0;
      break;
    }
    case SurfaceKind::sphere:
      dmax = fb / spec.sphere_depth + 1.0;
      break;
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = std::size_t(y) * w + x;
      const double d_ref = scene_disparity_at(spec, x, y);
      out.ref_disparity.values[idx] = d_ref;
      out.ref_depth.values[idx] = fb / d_ref;

      double v = scene_intensity_at(spec, x, y);
      if (spec.noise_std > 0.0)
        v += spec.noise_std * gaussian_noise(spec.seed, 0, idx);
      out.left.data[idx] = float(std::clamp(v, 0.0, 1.0));

      // right(x) = left-view intensity of the surface point that lands here.
      // With x_right = x_left - d the candidate left pixel is x + d, so solve
      // d = disparity(x + d). F is monotone except at occlusion folds;
      // scanning from dmax down picks the nearest (visible) surface.
      auto f = [&](double d) { return d - scene_disparity_at(spec, x + d, y); };
      double hi = dmax;  // f(dmax) > 0 by construction
      double lo = 0.0;   // f(0) = -disparity(x) < 0
      const double step = 0.25;
      for (double d = dmax - step; d > 0.0; d -= step) {
        if (f(d) <= 0.0) {
          lo = d;
          break;
        }
        hi = d;
      }
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double d_star = 0.5 * (lo + hi);
      double rv = scene_intensity_at(spec, x + d_star, y);
      if (spec.noise_std > 0.0)
        rv += spec.noise_std * gaussian_noise(spec.seed, 1, idx);
      out.right.data[idx] = float(std::clamp(rv, 0.0, 1.0));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// scene files

namespace {

const char* kKnownKeys[] = {
    "name",          "surface",         "disparity",
    "disparity0",    "disparity_gradient", "sphere_depth",
    "sphere_radius", "background_depth",   "texture",
    "texture_scale", "texture_octaves",    "shading",
    "ambient",       "highlight_strength", "highlight_falloff",
    "noise_std",     "seed",               "focal_px",
    "baseline",      "width",              "height",
};

}  // namespace

SceneSpec load_scene_spec(const std::string& path) {
  const KvFile kv = load_kv_file(path);
  for (const auto& [key, value] : kv.entries) {
    (void)value;
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw ConfigError(path + ": unknown scene key '" + key + "'");
  }

  SceneSpec s;
  s.name = kv_string_or(kv, "name", "scene");
  const std::string surface = kv_string_or(kv, "surface", "plane");
  if (surface == "plane")
    s.surface = SurfaceKind::plane;
  else if (surface == "slanted_plane")
    s.surface = SurfaceKind::slanted_plane;
  else if (surface == "sphere")
    s.surface = SurfaceKind::sphere;
  else
    throw ConfigError(path + ": unknown surface '" + surface + "'");

  s.disparity = kv_double_or(kv, "disparity", s.disparity);
  s.disparity0 = kv_double_or(kv, "disparity0", s.disparity0);
  s.disparity_gradient =
      kv_double_or(kv, "disparity_gradient", s.disparity_gradient);
  s.sphere_depth = kv_double_or(kv, "sphere_depth", s.sphere_depth);
  s.sphere_radius = kv_double_or(kv, "sphere_radius", s.sphere_radius);
  s.background_depth =
      kv_double_or(kv, "background_depth", s.background_depth);

  const std::string texture = kv_string_or(kv, "texture", "perlin");
  if (texture == "perlin")
    s.texture = TextureKind::perlin;
  else if (texture == "checker")
    s.texture = TextureKind::checker;
  else if (texture == "constant")
    s.texture = TextureKind::constant;
  else
    throw ConfigError(path + ": unknown texture '" + texture + "'");
  s.texture_scale = kv_double_or(kv, "texture_scale", s.texture_scale);
  s.texture_octaves = int(kv_int_or(kv, "texture_octaves", s.texture_octaves));

  const std::string shading = kv_string_or(kv, "shading", "diffuse");
  if (shading == "diffuse")
    s.shading = ShadingKind::diffuse;
  else if (shading == "nonlambertian")
    s.shading = ShadingKind::nonlambertian;
  else
    throw ConfigError(path + ": unknown shading '" + shading + "'");
  s.ambient = kv_double_or(kv, "ambient", s.ambient);
  s.highlight_strength =
      kv_double_or(kv, "highlight_strength", s.highlight_strength);
  s.highlight_falloff =
      kv_double_or(kv, "highlight_falloff", s.highlight_falloff);

  s.noise_std = kv_double_or(kv, "noise_std", s.noise_std);
  s.seed_explicit = kv.has("seed");
  s.seed = std::uint64_t(kv_int_or(kv, "seed", std::int64_t(s.seed)));
  s.focal_px = kv_double_or(kv, "focal_px", s.focal_px);
  s.baseline = kv_double_or(kv, "baseline", s.baseline);
  s.width = int(kv_int_or(kv, "width", s.width));
  s.height = int(kv_int_or(kv, "height", s.height));

  if (s.width < 2 || s.height < 2)
    throw ConfigError(path + ": width/height must be >= 2");
  if (!(s.focal_px > 0.0) || !(s.baseline > 0.0))
    throw ConfigError(path + ": focal_px and baseline must be positive");
  if (s.surface == SurfaceKind::plane && !(s.disparity > 0.0))
    throw ConfigError(path + ": disparity must be positive");
  if (s.surface == SurfaceKind::slanted_plane) {
    const double dend = s.disparity0 + s.disparity_gradient * (s.width - 1);
    if (!(s.disparity0 > 0.0) || !(dend > 0.0))
      throw ConfigError(path + ": slanted plane disparity must stay positive");
    if (!(std::fabs(s.disparity_gradient) < 0.5))
      throw ConfigError(path +
                        ": |disparity_gradient| must be < 0.5 px per px");
  }
  if (s.surface == SurfaceKind::sphere &&
      (!(s.sphere_depth > 0.0) || !(s.sphere_radius > 0.0) ||
       !(s.background_depth > s.sphere_depth)))
    throw ConfigError(path + ": sphere must sit in front of the background");
  if (s.texture_octaves < 1 || s.texture_octaves > 8)
    throw ConfigError(path + ": texture_octaves must be in 1..8");
  if (!(s.texture_scale > 1.0))
    throw ConfigError(path + ": texture_scale must be > 1 px");
  if (s.noise_std < 0.0)
    throw ConfigError(path + ": noise_std must be >= 0");
  return s;
}

}  // namespace pstereo
