// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace pdrf {

struct EncodingSpec {
  int num_bands = 0;       // L
  bool include_input = false;

  int out_dim(int in_dim) const {
    return in_dim * (2 * num_bands + (include_input ? 1 : 0));
  }
};

// sin/cos per (row, component, band); kept for the backward pass.
template <typename T>
struct EncodingCache {
  int rows = 0;
  int in_dim = 0;
  std::vector<T> sin_v;
  std::vector<T> cos_v;
};

// Frequency embedding: per component p and band l, emits sin(2^l*pi*p) and
// cos(2^l*pi*p); the raw component is prepended when include_input is set.
// Layout per row: [p?, sin_0, cos_0, sin_1, cos_1, ...] grouped by component.
// Band l+1 comes from the angle-doubling recurrence, so one sincos per
// component covers all bands.
template <typename T>
void positional_encode(const EncodingSpec& spec, const T* x, int rows, int in_dim, T* out,
                       EncodingCache<T>* cache = nullptr) {
  const int L = spec.num_bands;
  const int per_comp = 2 * L + (spec.include_input ? 1 : 0);
  if (cache) {
    cache->rows = rows;
    cache->in_dim = in_dim;
    cache->sin_v.resize(size_t(rows) * in_dim * L);
    cache->cos_v.resize(size_t(rows) * in_dim * L);
  }
  for (int r = 0; r < rows; ++r) {
    const T* xr = x + size_t(r) * in_dim;
    T* o = out + size_t(r) * in_dim * per_comp;
    for (int c = 0; c < in_dim; ++c) {
      const T p = xr[c];
      if (spec.include_input) *o++ = p;
      T s = std::sin(std::numbers::pi_v<T> * p);
      T cs = std::cos(std::numbers::pi_v<T> * p);
      for (int l = 0; l < L; ++l) {
        *o++ = s;
        *o++ = cs;
        if (cache) {
          const size_t idx = (size_t(r) * in_dim + c) * L + l;
          cache->sin_v[idx] = s;
          cache->cos_v[idx] = cs;
        }
        const T s2 = T(2) * s * cs;
        const T c2 = cs * cs - s * s;
        s = s2;
        cs = c2;
      }
    }
  }
}

// Accumulates d(loss)/dx given d(loss)/d(encoding).
template <typename T>
void positional_encode_backward(const EncodingSpec& spec, const EncodingCache<T>& cache,
                                const T* dout, T* dx_acc) {
  const int L = spec.num_bands;
  const int per_comp = 2 * L + (spec.include_input ? 1 : 0);
  for (int r = 0; r < cache.rows; ++r) {
    const T* d = dout + size_t(r) * cache.in_dim * per_comp;
    T* dx = dx_acc + size_t(r) * cache.in_dim;
    for (int c = 0; c < cache.in_dim; ++c) {
      T acc = 0;
      if (spec.include_input) acc += *d++;
      T freq = std::numbers::pi_v<T>;
      for (int l = 0; l < L; ++l) {
        const size_t idx = (size_t(r) * cache.in_dim + c) * L + l;
        const T ds = *d++;
        const T dc = *d++;
        acc += freq * (ds * cache.cos_v[idx] - dc * cache.sin_v[idx]);
        freq *= T(2);
      }
      dx[c] += acc;
    }
  }
}

}  // namespace pdrf
