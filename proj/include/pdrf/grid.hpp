// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pdrf/rng.hpp"
#include "pdrf/tensor.hpp"

namespace pdrf {

template <typename T>
struct Box {
  std::array<T, 3> lo{T(-1), T(-1), T(-1)};
  std::array<T, 3> hi{T(1), T(1), T(1)};

  T extent() const {
    return std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  }
};

// Axis-decomposed explicit feature volume: three 1-D factor banks of shapes
// (Cx,Rx), (Cy,Ry), (Cz,Rz). A query interpolates each bank at its axis
// coordinate and concatenates, giving a (Cx+Cy+Cz)-vector. Out-of-bounds
// points clamp to the box.
template <typename T>
struct FeatureGrid {
  std::array<int, 3> resolution{};
  std::array<int, 3> channels{};
  std::array<ParamTensor<T>, 3> factors;
  Box<T> bounds;

  static FeatureGrid make(const std::string& name, std::array<int, 3> res,
                          std::array<int, 3> chans, const Box<T>& bounds, Rng& rng,
                          T init_range = T(0.1)) {
    static constexpr const char* axis_names[3] = {"x", "y", "z"};
    FeatureGrid g;
    g.resolution = res;
    g.channels = chans;
    g.bounds = bounds;
    for (int a = 0; a < 3; ++a) {
      g.factors[a] = ParamTensor<T>(name + "." + axis_names[a], {chans[a], res[a]});
      for (auto& v : g.factors[a].values)
        v = T(rng.uniform(-double(init_range), double(init_range)));
    }
    return g;
  }

  int feature_dim() const { return channels[0] + channels[1] + channels[2]; }

  void collect_params(std::vector<ParamTensor<T>*>& out) {
    for (auto& f : factors) out.push_back(&f);
  }
};

// Per-sample interpolation state for the backward pass.
template <typename T>
struct GridCache {
  std::array<int, 3> i0{};
  std::array<T, 3> frac{};
  std::array<T, 3> dscale{};  // d(axis coord)/d(world coord); 0 when clamped
};

template <typename T>
void grid_query(const FeatureGrid<T>& grid, const T* point, T* out, GridCache<T>* cache) {
  int off = 0;
  for (int a = 0; a < 3; ++a) {
    const int r = grid.resolution[a];
    const int c = grid.channels[a];
    const T lo = grid.bounds.lo[a], hi = grid.bounds.hi[a];
    const T scale = T(r - 1) / (hi - lo);
    T u = (point[a] - lo) * scale;
    T ds = scale;
    if (u <= T(0)) {
      u = T(0);
      ds = T(0);
    } else if (u >= T(r - 1)) {
      u = T(r - 1);
      ds = T(0);
    }
    int i0 = int(u);
    if (i0 >= r - 1) i0 = r - 2;  // keep a valid right neighbor (r >= 2)
    const T f = u - T(i0);
    const T* bank = grid.factors[a].values.data();
    for (int ch = 0; ch < c; ++ch) {
      const T* row = bank + size_t(ch) * r;
      out[off + ch] = (T(1) - f) * row[i0] + f * row[i0 + 1];
    }
    if (cache) {
      cache->i0[a] = i0;
      cache->frac[a] = f;
      cache->dscale[a] = ds;
    }
    off += c;
  }
}

// Accumulates factor gradients into the sink and d(loss)/d(point) into dpoint.
template <typename T>
void grid_query_backward(FeatureGrid<T>& grid, const GridCache<T>& cache, const T* dout,
                         GradSink<T>& sink, T* dpoint_acc) {
  int off = 0;
  for (int a = 0; a < 3; ++a) {
    const int r = grid.resolution[a];
    const int c = grid.channels[a];
    const int i0 = cache.i0[a];
    const T f = cache.frac[a];
    auto fg = sink.grad(grid.factors[a]);
    const T* bank = grid.factors[a].values.data();
    T du = 0;
    for (int ch = 0; ch < c; ++ch) {
      const T g = dout[off + ch];
      const size_t row = size_t(ch) * r;
      fg[row + i0] += (T(1) - f) * g;
      fg[row + i0 + 1] += f * g;
      du += g * (bank[row + i0 + 1] - bank[row + i0]);
    }
    if (dpoint_acc) dpoint_acc[a] += du * cache.dscale[a];
    off += c;
  }
}

// Smoothness penalty: per axis bank, the mean of squared differences between
// adjacent entries along the resolution dimension, summed over the three axes.
template <typename T>
T tv_loss(const FeatureGrid<T>& grid) {
  T total = 0;
  for (int a = 0; a < 3; ++a) {
    const int r = grid.resolution[a];
    const int c = grid.channels[a];
    if (r < 2) continue;
    const T* bank = grid.factors[a].values.data();
    T axis_sum = 0;
    for (int ch = 0; ch < c; ++ch) {
      const T* row = bank + size_t(ch) * r;
      for (int i = 0; i + 1 < r; ++i) {
        const T d = row[i + 1] - row[i];
        axis_sum += d * d;
      }
    }
    total += axis_sum / (T(c) * T(r - 1));
  }
  return total;
}

// Accumulates weight * d(tv_loss)/d(factors) into the sink.
template <typename T>
void tv_loss_backward(FeatureGrid<T>& grid, T weight, GradSink<T>& sink) {
  for (int a = 0; a < 3; ++a) {
    const int r = grid.resolution[a];
    const int c = grid.channels[a];
    if (r < 2) continue;
    const T norm = weight * T(2) / (T(c) * T(r - 1));
    const T* bank = grid.factors[a].values.data();
    auto fg = sink.grad(grid.factors[a]);
    for (int ch = 0; ch < c; ++ch) {
      const size_t row = size_t(ch) * r;
      for (int i = 0; i + 1 < r; ++i) {
        const T d = norm * (bank[row + i + 1] - bank[row + i]);
        fg[row + i + 1] += d;
        fg[row + i] -= d;
      }
    }
  }
}

}  // namespace pdrf
