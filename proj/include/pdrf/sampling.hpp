// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdrf/rng.hpp"

namespace pdrf {

// Depths along one ray plus the per-sample intervals. t is strictly
// increasing; delta[i] = t[i+1] - t[i] with far - t[n-1] as the last entry.
template <typename T>
struct RaySamples {
  std::vector<T> t;
  std::vector<T> delta;
};

template <typename T>
void fill_intervals(const std::vector<T>& t, T far, std::vector<T>& delta) {
  const size_t n = t.size();
  delta.resize(n);
  for (size_t i = 0; i + 1 < n; ++i) delta[i] = t[i + 1] - t[i];
  if (n) delta[n - 1] = std::max(far - t[n - 1], T(0));
}

// Partitions [near, far] into n equal bins; one depth per bin (midpoint, or
// uniform within the bin when jittered).
template <typename T>
RaySamples<T> stratified_samples(T near, T far, int n, bool jitter, Rng& rng) {
  if (!(near >= T(0)) || !(near < far) || n < 1)
    throw std::invalid_argument("stratified_samples: need 0 <= near < far and n >= 1");
  RaySamples<T> s;
  s.t.resize(n);
  const T w = (far - near) / T(n);
  for (int i = 0; i < n; ++i) {
    const T u = jitter ? T(rng.uniform()) : T(0.5);
    s.t[i] = near + (T(i) + u) * w;
  }
  fill_intervals(s.t, far, s.delta);
  return s;
}

// Draws n_f depths from the piecewise-constant PDF given by bin weights over
// [near, far]: normalize, invert the CDF at stratified variates, interpolate
// linearly within the selected bin. All-zero weights fall back to a uniform
// PDF. Weights are treated as constants; no gradient flows through depths.
template <typename T>
std::vector<T> importance_sample(std::span<const T> weights, T near, T far, int n_f, Rng& rng,
                                 bool stratified = true) {
  const int nb = int(weights.size());
  if (nb < 1 || n_f < 1) throw std::invalid_argument("importance_sample: empty input");
  std::vector<T> cdf(nb + 1, T(0));
  T total = 0;
  for (int i = 0; i < nb; ++i) total += std::max(weights[i], T(0));
  if (total <= T(0)) {
    for (int i = 0; i <= nb; ++i) cdf[i] = T(i) / T(nb);
  } else {
    for (int i = 0; i < nb; ++i) cdf[i + 1] = cdf[i] + std::max(weights[i], T(0)) / total;
    cdf[nb] = T(1);
  }
  const T bin_w = (far - near) / T(nb);
  std::vector<T> out(n_f);
  for (int j = 0; j < n_f; ++j) {
    const T u = stratified ? (T(j) + T(rng.uniform())) / T(n_f) : T(rng.uniform());
    // smallest k with cdf[k+1] > u
    int lo = 0, hi = nb - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (cdf[mid + 1] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    const T mass = cdf[lo + 1] - cdf[lo];
    const T frac = mass > T(0) ? (u - cdf[lo]) / mass : T(0.5);
    out[j] = near + (T(lo) + frac) * bin_w;
  }
  return out;
}

// Merged, strictly increasing union of coarse and fine depths. Ties are
// nudged forward by 1e-6 * (far - near) to keep intervals positive.
template <typename T>
RaySamples<T> merge_depths(std::span<const T> coarse, std::span<const T> fine, T near, T far) {
  RaySamples<T> s;
  s.t.resize(coarse.size() + fine.size());
  std::merge(coarse.begin(), coarse.end(), fine.begin(), fine.end(), s.t.begin());
  const T nudge = T(1e-6) * (far - near);
  for (size_t i = 1; i < s.t.size(); ++i)
    if (s.t[i] <= s.t[i - 1]) s.t[i] = s.t[i - 1] + nudge;
  fill_intervals(s.t, far, s.delta);
  return s;
}

}  // namespace pdrf
