// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <span>

#include "pdrf/camera.hpp"
#include "pdrf/losses.hpp"

namespace pdrf {

template <typename T, typename U>
Camera<T> camera_cast(const Camera<U>& c) {
  Camera<T> out;
  for (int i = 0; i < 9; ++i) out.rotation.m[i] = T(c.rotation.m[i]);
  out.origin = {T(c.origin.x), T(c.origin.y), T(c.origin.z)};
  out.focal = T(c.focal);
  out.cx = T(c.cx);
  out.cy = T(c.cy);
  out.width = c.width;
  out.height = c.height;
  return out;
}

namespace detail {

template <typename T>
std::span<const T> unit_weight() {
  static const T one = T(1);
  return std::span<const T>(&one, 1);
}

template <typename T>
std::array<T, 3> maybe_gamma(const std::array<T, 3>& c, bool apply) {
  if (!apply) return c;
  return {gamma_encode(c[0]), gamma_encode(c[1]), gamma_encode(c[2])};
}

// `pre` is the pre-gamma blend; dout the gradient on the gamma output.
template <typename T>
std::array<T, 3> maybe_gamma_backward(const std::array<T, 3>& pre, const std::array<T, 3>& dout,
                                      bool apply) {
  if (!apply) return dout;
  return {gamma_encode_backward(pre[0], dout[0]), gamma_encode_backward(pre[1], dout[1]),
          gamma_encode_backward(pre[2], dout[2])};
}

}  // namespace detail

}  // namespace pdrf
