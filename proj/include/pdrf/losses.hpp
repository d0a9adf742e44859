// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace pdrf {

inline constexpr double kGammaExponent = 1.0 / 2.2;
inline constexpr double kGammaEps = 1e-6;  // keeps the gradient finite at 0

// Camera response model: (x + eps)^(1/2.2), componentwise.
template <typename T>
T gamma_encode(T x) {
  return std::pow(x + T(kGammaEps), T(kGammaExponent));
}

template <typename T>
T gamma_encode_backward(T x, T dout) {
  return dout * T(kGammaExponent) * std::pow(x + T(kGammaEps), T(kGammaExponent) - T(1));
}

// Mean over the batch of the per-pixel squared L2 (summed over channels).
template <typename T>
T photometric_loss(std::span<const std::array<T, 3>> pred, std::span<const std::array<T, 3>> target) {
  if (pred.size() != target.size()) throw std::invalid_argument("photometric_loss: shape mismatch");
  T acc = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) {
      const T d = pred[i][ch] - target[i][ch];
      acc += d * d;
    }
  return acc / T(pred.size());
}

// Per-item contribution helpers (the trainer streams one ray at a time).
template <typename T>
T squared_error(const std::array<T, 3>& pred, const std::array<T, 3>& target) {
  T acc = 0;
  for (int ch = 0; ch < 3; ++ch) {
    const T d = pred[ch] - target[ch];
    acc += d * d;
  }
  return acc;
}

template <typename T>
std::array<T, 3> squared_error_backward(const std::array<T, 3>& pred,
                                        const std::array<T, 3>& target, T scale) {
  return {scale * T(2) * (pred[0] - target[0]), scale * T(2) * (pred[1] - target[1]),
          scale * T(2) * (pred[2] - target[2])};
}

// Both blur-blend terms, as written: stage-1 blend error plus stage-2 blend error.
template <typename T>
T coarse_loss(std::span<const std::array<T, 3>> stage1_blend,
              std::span<const std::array<T, 3>> stage2_blend,
              std::span<const std::array<T, 3>> target) {
  return photometric_loss<T>(stage1_blend, target) + photometric_loss<T>(stage2_blend, target);
}

template <typename T>
T total_loss(T coarse, T fine, T tv_coar, T tv_fine, T tv_weight) {
  return coarse + fine + tv_weight * (tv_coar + tv_fine);
}

}  // namespace pdrf
