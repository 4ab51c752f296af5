#pragma once

#include <cstdint>
#include <string>

#include "pstereo/depth_variance.hpp"
#include "pstereo/fields.hpp"
#include "pstereo/image.hpp"

namespace pstereo {

enum class SurfaceKind { plane, slanted_plane, sphere };
enum class TextureKind { perlin, checker, constant };
enum class ShadingKind { diffuse, nonlambertian };

// Analytic test scene. Geometry is expressed in depth units (mm): a
// fronto-parallel plane given by its disparity, a plane with a horizontal
// disparity gradient, or a sphere in front of a background plane with its
// nearest point at sphere_depth.
struct SceneSpec {
  std::string name = "scene";
  SurfaceKind surface = SurfaceKind::plane;
  double disparity = 8.0;         // plane: constant disparity, px
  double disparity0 = 8.0;        // slanted_plane: disparity at x = 0
  double disparity_gradient = 0.0;  // slanted_plane: d(disparity)/dx
  double sphere_depth = 60.0;     // sphere: nearest surface depth, mm
  double sphere_radius = 20.0;    // mm
  double background_depth = 90.0; // mm

  TextureKind texture = TextureKind::perlin;
  double texture_scale = 32.0;    // base wavelength of the value noise / the
                                  // checker period, px at the reference depth
  int texture_octaves = 4;

  ShadingKind shading = ShadingKind::diffuse;
  double ambient = 0.3;             // floor of the diffuse term
  double highlight_strength = 0.7;  // nonlambertian: blend weight toward white
  double highlight_falloff = 6.0;   // nonlambertian: cos^falloff concentration

  double noise_std = 0.0;  // additive Gaussian intensity noise per image
  std::uint64_t seed = 1;
  bool seed_explicit = false;  // scene file carried its own seed key

  double focal_px = 500.0;
  double baseline = 5.0;  // mm
  int width = 640;
  int height = 480;
};

// Parses a "key = value" scene file (keys match the field names above,
// surface/texture/shading by name). Unknown keys are ConfigErrors.
SceneSpec load_scene_spec(const std::string& path);

struct RenderedScene {
  GrayImage left;
  GrayImage right;
  ScalarField ref_disparity;  // px, indexed by left pixel
  ScalarField ref_depth;      // mm, indexed by left pixel
  CameraParams cam;
  SceneSpec spec;
};

// Depth (mm) of the surface seen through left pixel (x, y); continuous in
// (x, y). Pinhole camera with the principal point at the image center.
double scene_depth_at(const SceneSpec& spec, double x, double y);

// focal_px * baseline / depth.
double scene_disparity_at(const SceneSpec& spec, double x, double y);

// Shaded left-view intensity, continuous in (x, y), noise-free.
double scene_intensity_at(const SceneSpec& spec, double x, double y);

// Seeded multi-octave value noise in [0, 1], smooth and deterministic.
double value_noise(double x, double y, std::uint64_t seed, int octaves,
                   double base_scale);

// Deterministic standard normal draw keyed by (seed, stream, index).
double gaussian_noise(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index);

// Renders the pair: left(x,y) = intensity(x,y), right(x,y) =
// intensity(x + d, y) with d solved per right pixel (rectified convention
// x_right = x_left - d) so that corresponding points agree exactly; the
// nearest surface wins where the mapping folds. Gaussian noise is added per
// image afterwards.
RenderedScene render_scene(const SceneSpec& spec);

}  // namespace pstereo
