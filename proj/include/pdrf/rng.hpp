// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace pdrf {

// splitmix64. Small, fast, and fully specified, so sampling sequences are
// reproducible across compilers and standard libraries.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed = 0) : state(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  uint32_t uniform_u32(uint32_t n) {  // [0, n)
    return uint32_t((__uint128_t(next_u64()) * n) >> 64);
  }
};

// Deterministic stream derivation for per-ray / per-pixel RNGs.
inline uint64_t mix_seed(uint64_t a, uint64_t b = 0x6a09e667f3bcc909ull, uint64_t c = 0) {
  Rng r(a * 0x9e3779b97f4a7c15ull + b * 0xc2b2ae3d27d4eb4full + c * 0x165667b19e3779f9ull + 1);
  return r.next_u64();
}

}  // namespace pdrf
