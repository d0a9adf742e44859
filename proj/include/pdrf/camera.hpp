// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "pdrf/vec.hpp"

namespace pdrf {

// Pinhole camera. Pose is the world-from-camera transform; the camera looks
// along its local -z axis. Square pixels (fy == fx).
template <typename T>
struct Camera {
  Mat3<T> rotation;   // world-from-camera
  Vec3<T> origin;
  T focal = 1;        // pixels
  T cx = 0, cy = 0;   // principal point, pixels
  int width = 0, height = 0;

  static Camera look_at(const Vec3<T>& origin, const Vec3<T>& target, const Vec3<T>& up,
                        T focal, int width, int height) {
    const Vec3<T> zc = normalized(origin - target);  // -z looks at the target
    const Vec3<T> xc = normalized(cross(up, zc));
    const Vec3<T> yc = cross(zc, xc);
    Camera c;
    c.rotation = Mat3<T>::from_cols(xc, yc, zc);
    c.origin = origin;
    c.focal = focal;
    c.cx = T(width) / T(2);
    c.cy = T(height) / T(2);
    c.width = width;
    c.height = height;
    return c;
  }
};

template <typename T>
struct Ray {
  Vec3<T> origin;
  Vec3<T> direction;  // unit length
};

// Accumulated d(loss)/d(ray) produced by renderer backward passes.
template <typename T>
struct RayGrads {
  Vec3<T> origin{};
  Vec3<T> direction{};
};

// Kept by generate_ray so the direction's pixel gradient can be evaluated.
template <typename T>
struct RayDirCache {
  Vec3<T> dir;
  T inv_norm = 1;
};

// Pixel coordinates may be fractional and slightly outside the frame (blur
// kernel offsets require it).
template <typename T>
Ray<T> generate_ray(const Camera<T>& cam, T px, T py, RayDirCache<T>* cache = nullptr) {
  const Vec3<T> v_cam{(px - cam.cx) / cam.focal, (py - cam.cy) / cam.focal, T(-1)};
  const Vec3<T> v = cam.rotation * v_cam;
  const T inv_n = T(1) / norm(v);
  const Vec3<T> d = v * inv_n;
  if (cache) {
    cache->dir = d;
    cache->inv_norm = inv_n;
  }
  return {cam.origin, d};
}

// Given d(loss)/d(direction), accumulates d(loss)/d(pixel).
template <typename T>
void ray_dir_backward(const Camera<T>& cam, const RayDirCache<T>& cache, const Vec3<T>& ddir,
                      T* dpx, T* dpy) {
  // dv = (ddir - d (d . ddir)) / |v|
  const T proj = dot(cache.dir, ddir);
  const Vec3<T> dv = (ddir - cache.dir * proj) * cache.inv_norm;
  *dpx += dot(dv, cam.rotation.col(0)) / cam.focal;
  *dpy += dot(dv, cam.rotation.col(1)) / cam.focal;
}

// Inverse of generate_ray for points in front of the camera.
template <typename T>
void project(const Camera<T>& cam, const Vec3<T>& point, T* px, T* py) {
  const Vec3<T> p = cam.rotation.transposed_mul(point - cam.origin);
  if (p.z >= T(0)) throw std::invalid_argument("project: point is behind the camera");
  *px = cam.cx + cam.focal * (p.x / -p.z);
  *py = cam.cy + cam.focal * (p.y / -p.z);
}

}  // namespace pdrf
