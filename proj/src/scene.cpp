// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/scene.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pdrf/losses.hpp"

namespace pdrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFarSentinel = 1e9;

double sphere_hit(const SceneSphere& s, const Vec3<double>& o, const Vec3<double>& d) {
  const Vec3<double> oc = o - s.center;
  const double b = dot(oc, d);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0) return kInf;
  const double sq = std::sqrt(disc);
  const double t0 = -b - sq;
  if (t0 > 1e-9) return t0;
  const double t1 = -b + sq;
  return t1 > 1e-9 ? t1 : kInf;
}

double box_hit(const SceneBox& b, const Vec3<double>& o, const Vec3<double>& d) {
  double t_near = -kInf, t_far = kInf;
  for (int a = 0; a < 3; ++a) {
    const double da = d[a], oa = o[a];
    const double lo = b.lo[a], hi = b.hi[a];
    if (std::abs(da) < 1e-15) {
      if (oa < lo || oa > hi) return kInf;
      continue;
    }
    double t0 = (lo - oa) / da, t1 = (hi - oa) / da;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return kInf;
  }
  if (t_near > 1e-9) return t_near;
  return t_far > 1e-9 ? t_far : kInf;
}

double plane_hit(const ScenePlane& p, const Vec3<double>& o, const Vec3<double>& d,
                 Vec3<double>* albedo) {
  if (std::abs(d.z) < 1e-15) return kInf;
  const double t = (p.plane_z - o.z) / d.z;
  if (t <= 1e-9) return kInf;
  const double hx = o.x + t * d.x;
  const double hy = o.y + t * d.y;
  if (std::abs(hx) > p.half_x || std::abs(hy) > p.half_y) return kInf;
  if (albedo) {
    const long ix = long(std::floor(hx / p.cell));
    const long iy = long(std::floor(hy / p.cell));
    *albedo = ((ix + iy) & 1) ? p.albedo_b : p.albedo_a;
  }
  return t;
}

}  // namespace

double scene_hit(const AnalyticScene& scene, const Vec3<double>& origin, const Vec3<double>& dir,
                 Vec3<double>* albedo_out) {
  double best = kInf;
  Vec3<double> albedo = scene.background;
  for (const auto& s : scene.spheres) {
    const double t = sphere_hit(s, origin, dir);
    if (t < best) {
      best = t;
      albedo = s.albedo;
    }
  }
  for (const auto& b : scene.boxes) {
    const double t = box_hit(b, origin, dir);
    if (t < best) {
      best = t;
      albedo = b.albedo;
    }
  }
  for (const auto& p : scene.planes) {
    Vec3<double> a;
    const double t = plane_hit(p, origin, dir, &a);
    if (t < best) {
      best = t;
      albedo = a;
    }
  }
  if (albedo_out) *albedo_out = albedo;
  return best;
}

Image trace_ground_truth(const AnalyticScene& scene, const Camera<double>& cam, Image* depth_out) {
  Image img(cam.width, cam.height, 3);
  if (depth_out) *depth_out = Image(cam.width, cam.height, 1);
  const Vec3<double> axis = cam.rotation.col(2) * -1.0;  // optical axis
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const Ray<double> ray = generate_ray(cam, double(x), double(y));
      Vec3<double> albedo;
      const double t = scene_hit(scene, ray.origin, ray.direction, &albedo);
      const Vec3<double> c = t < kInf ? albedo : scene.background;
      img.at(x, y, 0) = float(c.x);
      img.at(x, y, 1) = float(c.y);
      img.at(x, y, 2) = float(c.z);
      if (depth_out)
        depth_out->at(x, y, 0) =
            t < kInf ? float(t * dot(ray.direction, axis)) : float(kFarSentinel);
    }
  }
  return img;
}

Image synthesize_motion_blur(const AnalyticScene& scene, const std::vector<Camera<double>>& poses) {
  if (poses.empty()) throw std::invalid_argument("synthesize_motion_blur: need at least one pose");
  Image acc = trace_ground_truth(scene, poses[0]);
  for (size_t k = 1; k < poses.size(); ++k) {
    const Image next = trace_ground_truth(scene, poses[k]);
    for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += next.data[i];
  }
  const float inv = 1.f / float(poses.size());
  for (auto& v : acc.data) v *= inv;
  return acc;
}

Image synthesize_defocus_blur(const AnalyticScene& scene, const Camera<double>& cam,
                              double aperture, double focus_depth, int lens_samples, Rng& rng) {
  if (focus_depth <= 0) throw std::invalid_argument("synthesize_defocus_blur: focus_depth > 0");
  if (lens_samples < 1) throw std::invalid_argument("synthesize_defocus_blur: lens_samples >= 1");
  Image img(cam.width, cam.height, 3);
  const Vec3<double> axis = cam.rotation.col(2) * -1.0;
  const Vec3<double> lens_u = cam.rotation.col(0);
  const Vec3<double> lens_v = cam.rotation.col(1);

  // One disc sample set per image keeps the integration identical across
  // pixels, so a focal-plane scene stays exactly sharp.
  std::vector<std::pair<double, double>> disc(lens_samples);
  for (auto& s : disc) {
    const double r = std::sqrt(rng.uniform());
    const double phi = rng.uniform() * 2.0 * std::numbers::pi;
    s = {r * std::cos(phi) * aperture, r * std::sin(phi) * aperture};
  }

  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const Ray<double> central = generate_ray(cam, double(x), double(y));
      // point on the (flat) focal plane along this pixel's ray
      const double s = focus_depth / dot(central.direction, axis);
      const Vec3<double> focus_pt = central.origin + central.direction * s;
      Vec3<double> acc{0, 0, 0};
      for (const auto& [du, dv] : disc) {
        const Vec3<double> o = cam.origin + lens_u * du + lens_v * dv;
        const Vec3<double> d = normalized(focus_pt - o);
        Vec3<double> albedo;
        const double t = scene_hit(scene, o, d, &albedo);
        acc += (t < kInf) ? albedo : scene.background;
      }
      const double inv = 1.0 / lens_samples;
      img.at(x, y, 0) = float(acc.x * inv);
      img.at(x, y, 1) = float(acc.y * inv);
      img.at(x, y, 2) = float(acc.z * inv);
    }
  }
  return img;
}

// ---------------------------------------------------------------------------

PresetGeometry preset_geometry() {
  PresetGeometry g;
  g.bounds.lo = {-1.7, -1.7, -1.7};
  g.bounds.hi = {1.7, 1.7, 1.7};
  g.near = 1.6;
  g.far = 5.6;
  g.focus_depth = 3.1;
  g.aperture = 0.35;
  return g;
}

AnalyticScene make_preset_scene(const std::string& preset) {
  if (preset != "spheres")
    throw std::invalid_argument("unknown preset '" + preset + "' (available: spheres)");
  AnalyticScene s;
  s.bounds = preset_geometry().bounds;
  s.background = {0, 0, 0};
  s.spheres.push_back({{-0.50, -0.25, 0.30}, 0.45, {0.85, 0.20, 0.15}});
  s.spheres.push_back({{0.55, 0.05, 0.10}, 0.40, {0.20, 0.55, 0.85}});
  s.spheres.push_back({{0.05, 0.58, 0.45}, 0.30, {0.95, 0.80, 0.20}});
  s.planes.push_back({-1.30, 1.65, 1.65, 0.40, {0.90, 0.90, 0.82}, {0.12, 0.16, 0.28}});
  return s;
}

namespace {

// Cameras on an arc in front of the scene, looking at the origin.
// frac in [0,1] sweeps the azimuth range.
Camera<double> preset_camera(double frac, double elevation, int res, double radius) {
  const double azimuth = -0.75 + 1.5 * frac;
  const Vec3<double> pos{radius * std::sin(azimuth) * std::cos(elevation),
                         radius * std::sin(elevation),
                         radius * std::cos(azimuth) * std::cos(elevation)};
  const double focal = 1.45 * res;
  return Camera<double>::look_at(pos, {0, 0, 0}, {0, -1, 0}, focal, res, res);
}

Image finalize_training_image(const Image& linear) {
  Image img = linear;
  for (auto& v : img.data) v = float(gamma_encode(double(v)));
  return quantized(img, 8);
}

Image finalize_sharp_image(const Image& linear) {
  Image img = linear;
  for (auto& v : img.data) v = float(gamma_encode(double(v)));
  return quantized(img, 16);
}

}  // namespace

SceneDataset make_preset_dataset(const std::string& preset, const std::string& blur_type,
                                 int views, int res, uint64_t seed) {
  if (blur_type != "none" && blur_type != "motion" && blur_type != "defocus")
    throw std::invalid_argument("unknown blur type '" + blur_type + "'");
  const AnalyticScene scene = make_preset_scene(preset);
  const PresetGeometry geom = preset_geometry();
  const double radius = 3.5;
  constexpr int kMotionPoses = 9;

  SceneDataset ds;
  for (int i = 0; i < views; ++i) {
    SceneView view;
    char buf[32];
    std::snprintf(buf, sizeof buf, "train_%03d", i);
    view.name = buf;
    const double frac = views == 1 ? 0.5 : double(i) / double(views - 1);
    view.camera = preset_camera(frac, 0.18 * ((i % 2 == 0) ? 1.0 : -1.0), res, radius);

    Rng rng(mix_seed(seed, 0xb1u, uint64_t(i)));
    if (blur_type == "none") {
      view.blur = {"none", {}};
      view.image = finalize_training_image(trace_ground_truth(scene, view.camera));
    } else if (blur_type == "motion") {
      // Linear origin translation across the exposure, perpendicular to the
      // optical axis; magnitude stays well inside the 10 px kernel bound.
      const double mag = 0.18 + 0.08 * rng.uniform();
      const double ang = rng.uniform() * 2.0 * std::numbers::pi;
      const Vec3<double> delta = view.camera.rotation.col(0) * (mag * std::cos(ang)) +
                                 view.camera.rotation.col(1) * (mag * std::sin(ang));
      std::vector<Camera<double>> poses(kMotionPoses, view.camera);
      for (int k = 0; k < kMotionPoses; ++k) {
        const double u = double(k) / double(kMotionPoses - 1) - 0.5;
        poses[k].origin = view.camera.origin + delta * u;
      }
      view.blur = {"motion", {delta.x, delta.y, delta.z, double(kMotionPoses)}};
      view.image = finalize_training_image(synthesize_motion_blur(scene, poses));
    } else {
      constexpr int kLensSamples = 96;
      view.blur = {"defocus", {geom.aperture, geom.focus_depth, double(kLensSamples)}};
      view.image = finalize_training_image(
          synthesize_defocus_blur(scene, view.camera, geom.aperture, geom.focus_depth,
                                  kLensSamples, rng));
    }
    ds.train.push_back(std::move(view));
  }

  for (int i = 0; i < 2; ++i) {
    SceneView view;
    char buf[32];
    std::snprintf(buf, sizeof buf, "test_%03d", i);
    view.name = buf;
    // Held-out poses sit between training poses, at intermediate elevation.
    view.camera = preset_camera(i == 0 ? 0.36 : 0.64, 0.08, res, radius);
    view.blur = {"holdout", {}};
    view.image = finalize_sharp_image(trace_ground_truth(scene, view.camera));
    ds.held_out.push_back(std::move(view));
  }
  return ds;
}

}  // namespace pdrf
