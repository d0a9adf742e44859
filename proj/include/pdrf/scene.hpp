// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdrf/camera.hpp"
#include "pdrf/grid.hpp"
#include "pdrf/image.hpp"
#include "pdrf/rng.hpp"
#include "pdrf/vec.hpp"

namespace pdrf {

// Analytic ground-truth scene: flat-shaded primitives traced by nearest hit.
// Serves as the oracle for blur synthesis and evaluation.

struct SceneSphere {
  Vec3<double> center;
  double radius;
  Vec3<double> albedo;
};

struct SceneBox {
  Vec3<double> lo, hi;
  Vec3<double> albedo;
};

// Finite axis-aligned rectangle at z = plane_z facing +z, checkerboard albedo.
struct ScenePlane {
  double plane_z;
  double half_x, half_y;
  double cell;
  Vec3<double> albedo_a, albedo_b;
};

struct AnalyticScene {
  std::vector<SceneSphere> spheres;
  std::vector<SceneBox> boxes;
  std::vector<ScenePlane> planes;
  Vec3<double> background{0, 0, 0};
  Box<double> bounds;
};

// Nearest-hit query. Returns the hit distance along the (unit) ray direction
// or infinity; albedo_out receives the surface albedo on a hit.
double scene_hit(const AnalyticScene& scene, const Vec3<double>& origin, const Vec3<double>& dir,
                 Vec3<double>* albedo_out);

// Per-pixel nearest-hit render in linear color. When depth_out is given it
// receives the axial depth (distance along the camera's optical axis;
// misses get the far sentinel 1e9).
Image trace_ground_truth(const AnalyticScene& scene, const Camera<double>& cam,
                         Image* depth_out = nullptr);

// Average of sharp renders over a pose trajectory.
Image synthesize_motion_blur(const AnalyticScene& scene, const std::vector<Camera<double>>& poses);

// Thin-lens integration: lens origins jittered on the aperture disc, all rays
// through the pixel's point on the focal plane (perpendicular to the optical
// axis at focus_depth).
Image synthesize_defocus_blur(const AnalyticScene& scene, const Camera<double>& cam,
                              double aperture, double focus_depth, int lens_samples, Rng& rng);

// ---------------------------------------------------------------------------
// Dataset: posed views with blur descriptors.

struct BlurMeta {
  std::string type;             // none | motion | defocus | holdout
  std::vector<double> params;   // motion: dx dy dz M; defocus: aperture focus_depth samples
};

struct SceneView {
  std::string name;
  Camera<double> camera;
  BlurMeta blur;
  Image image;
};

struct SceneDataset {
  std::vector<SceneView> train;     // blurry (or sharp for the no-blur control)
  std::vector<SceneView> held_out;  // sharp ground truth
};

// World-space settings shared by all shipped presets.
struct PresetGeometry {
  Box<double> bounds;
  double near, far;
  double focus_depth;  // defocus presets
  double aperture;
};
PresetGeometry preset_geometry();

AnalyticScene make_preset_scene(const std::string& preset);

// Builds the preset dataset: `views` training cameras plus 2 held-out sharp
// cameras at `res`^2, with the requested blur applied to training views.
// Training images are gamma-encoded and 8-bit quantized; held-out images are
// gamma-encoded at 16-bit precision.
SceneDataset make_preset_dataset(const std::string& preset, const std::string& blur_type,
                                 int views, int res, uint64_t seed);

}  // namespace pdrf
