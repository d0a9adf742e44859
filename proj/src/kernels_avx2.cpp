// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_internal.hpp"

#include "pdrf/kernels/kernels.hpp"

#if defined(PDRF_BUILD_AVX2)

#include <immintrin.h>

namespace pdrf::kernels::avx2 {

bool available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

inline float dot_tail(const float* x, const float* y, size_t n) {
  float acc = 0.f;
  for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

// One C row pair against four B rows: 8 independent FMA chains over k.
inline void nt_block_2x4(const float* a0, const float* a1, const float* b, size_t ldb,
                         size_t k, float* out00, float* out10) {
  const float* b0 = b;
  const float* b1 = b + ldb;
  const float* b2 = b + 2 * ldb;
  const float* b3 = b + 3 * ldb;
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c02 = _mm256_setzero_ps(), c03 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c12 = _mm256_setzero_ps(), c13 = _mm256_setzero_ps();
  size_t p = 0;
  for (; p + 8 <= k; p += 8) {
    const __m256 va0 = _mm256_loadu_ps(a0 + p);
    const __m256 va1 = _mm256_loadu_ps(a1 + p);
    const __m256 vb0 = _mm256_loadu_ps(b0 + p);
    const __m256 vb1 = _mm256_loadu_ps(b1 + p);
    const __m256 vb2 = _mm256_loadu_ps(b2 + p);
    const __m256 vb3 = _mm256_loadu_ps(b3 + p);
    c00 = _mm256_fmadd_ps(va0, vb0, c00);
    c01 = _mm256_fmadd_ps(va0, vb1, c01);
    c02 = _mm256_fmadd_ps(va0, vb2, c02);
    c03 = _mm256_fmadd_ps(va0, vb3, c03);
    c10 = _mm256_fmadd_ps(va1, vb0, c10);
    c11 = _mm256_fmadd_ps(va1, vb1, c11);
    c12 = _mm256_fmadd_ps(va1, vb2, c12);
    c13 = _mm256_fmadd_ps(va1, vb3, c13);
  }
  out00[0] = hsum(c00) + dot_tail(a0 + p, b0 + p, k - p);
  out00[1] = hsum(c01) + dot_tail(a0 + p, b1 + p, k - p);
  out00[2] = hsum(c02) + dot_tail(a0 + p, b2 + p, k - p);
  out00[3] = hsum(c03) + dot_tail(a0 + p, b3 + p, k - p);
  out10[0] = hsum(c10) + dot_tail(a1 + p, b0 + p, k - p);
  out10[1] = hsum(c11) + dot_tail(a1 + p, b1 + p, k - p);
  out10[2] = hsum(c12) + dot_tail(a1 + p, b2 + p, k - p);
  out10[3] = hsum(c13) + dot_tail(a1 + p, b3 + p, k - p);
}

}  // namespace

float dot(const float* x, const float* y, size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8)
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
  return hsum(_mm256_add_ps(acc0, acc1)) + dot_tail(x + i, y + i, n - i);
}

void gemm_nt(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta) {
  size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const float* a0 = a + i * k;
    const float* a1 = a0 + k;
    float* c0 = c + i * n;
    float* c1 = c0 + n;
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      float r0[4], r1[4];
      nt_block_2x4(a0, a1, b + j * k, k, k, r0, r1);
      if (beta == 0.f) {
        for (int q = 0; q < 4; ++q) c0[j + q] = r0[q];
        for (int q = 0; q < 4; ++q) c1[j + q] = r1[q];
      } else {
        for (int q = 0; q < 4; ++q) c0[j + q] = beta * c0[j + q] + r0[q];
        for (int q = 0; q < 4; ++q) c1[j + q] = beta * c1[j + q] + r1[q];
      }
    }
    for (; j < n; ++j) {
      const float* bj = b + j * k;
      const float r0 = dot(a0, bj, k);
      const float r1 = dot(a1, bj, k);
      c0[j] = (beta == 0.f) ? r0 : beta * c0[j] + r0;
      c1[j] = (beta == 0.f) ? r1 : beta * c1[j] + r1;
    }
  }
  for (; i < m; ++i) {
    const float* ai = a + i * k;
    float* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) {
      const float r = dot(ai, b + j * k, k);
      ci[j] = (beta == 0.f) ? r : beta * ci[j] + r;
    }
  }
}

void gemm_nn(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta) {
  for (size_t i = 0; i < m; ++i) {
    float* ci = c + i * n;
    if (beta == 0.f) {
      fill(0.f, ci, n);
    } else if (beta != 1.f) {
      scale(beta, ci, n);
    }
    const float* ai = a + i * k;
    size_t p = 0;
    for (; p + 2 <= k; p += 2) {
      const __m256 a0 = _mm256_set1_ps(ai[p]);
      const __m256 a1 = _mm256_set1_ps(ai[p + 1]);
      const float* b0 = b + p * n;
      const float* b1 = b0 + n;
      size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 acc = _mm256_loadu_ps(ci + j);
        acc = _mm256_fmadd_ps(a0, _mm256_loadu_ps(b0 + j), acc);
        acc = _mm256_fmadd_ps(a1, _mm256_loadu_ps(b1 + j), acc);
        _mm256_storeu_ps(ci + j, acc);
      }
      for (; j < n; ++j) ci[j] += ai[p] * b0[j] + ai[p + 1] * b1[j];
    }
    for (; p < k; ++p) {
      const __m256 a0 = _mm256_set1_ps(ai[p]);
      const float* b0 = b + p * n;
      size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 acc = _mm256_loadu_ps(ci + j);
        acc = _mm256_fmadd_ps(a0, _mm256_loadu_ps(b0 + j), acc);
        _mm256_storeu_ps(ci + j, acc);
      }
      for (; j < n; ++j) ci[j] += ai[p] * b0[j];
    }
  }
}

void gemm_tn_acc(const float* a, const float* b, float* c, size_t m, size_t n, size_t k) {
  for (size_t p = 0; p < k; ++p) {
    const float* ap = a + p * m;
    const float* bp = b + p * n;
    for (size_t i = 0; i < m; ++i) {
      const __m256 av = _mm256_set1_ps(ap[i]);
      float* ci = c + i * n;
      size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 acc = _mm256_loadu_ps(ci + j);
        acc = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp + j), acc);
        _mm256_storeu_ps(ci + j, acc);
      }
      for (; j < n; ++j) ci[j] += ap[i] * bp[j];
    }
  }
}

void add_bias_rows(float* y, const float* bias, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i) {
    float* yi = y + i * cols;
    size_t j = 0;
    for (; j + 8 <= cols; j += 8)
      _mm256_storeu_ps(yi + j, _mm256_add_ps(_mm256_loadu_ps(yi + j), _mm256_loadu_ps(bias + j)));
    for (; j < cols; ++j) yi[j] += bias[j];
  }
}

void colsum_acc(const float* y, float* out, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i) {
    const float* yi = y + i * cols;
    size_t j = 0;
    for (; j + 8 <= cols; j += 8)
      _mm256_storeu_ps(out + j, _mm256_add_ps(_mm256_loadu_ps(out + j), _mm256_loadu_ps(yi + j)));
    for (; j < cols; ++j) out[j] += yi[j];
  }
}

void relu(const float* z, float* a, size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(a + i, _mm256_max_ps(_mm256_loadu_ps(z + i), zero));
  for (; i < n; ++i) a[i] = z[i] > 0.f ? z[i] : 0.f;
}

void relu_backward(const float* z, const float* da, float* dz, size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(z + i), zero, _CMP_GT_OQ);
    _mm256_storeu_ps(dz + i, _mm256_and_ps(_mm256_loadu_ps(da + i), mask));
  }
  for (; i < n; ++i) dz[i] = z[i] > 0.f ? da[i] : 0.f;
}

void axpy(float alpha, const float* x, float* y, size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float alpha, float* x, size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void fill(float v, float* x, size_t n) {
  const __m256 vv = _mm256_set1_ps(v);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, vv);
  for (; i < n; ++i) x[i] = v;
}

void add(const float* x, float* y, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += x[i];
}

void weighted_rowsum(const float* f, const float* w, float* out, size_t rows, size_t cols) {
  fill(0.f, out, cols);
  for (size_t i = 0; i < rows; ++i) axpy(w[i], f + i * cols, out, cols);
}

void adam_update(float* p, const float* g, float* m, float* v, size_t n,
                 float lr, float beta1, float beta2, float eps,
                 float inv_bc1, float inv_bc2) {
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb1c = _mm256_set1_ps(1.f - beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vb2c = _mm256_set1_ps(1.f - beta2);
  const __m256 vlr = _mm256_set1_ps(lr);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 vibc1 = _mm256_set1_ps(inv_bc1);
  const __m256 vibc2 = _mm256_set1_ps(inv_bc2);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    __m256 mv = _mm256_fmadd_ps(vb1c, gv, _mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)));
    __m256 vv = _mm256_fmadd_ps(vb2c, _mm256_mul_ps(gv, gv), _mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)));
    _mm256_storeu_ps(m + i, mv);
    _mm256_storeu_ps(v + i, vv);
    const __m256 mhat = _mm256_mul_ps(mv, vibc1);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vv, vibc2)), veps);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), denom);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
  }
  if (i < n)
    ref::adam_update(p + i, g + i, m + i, v + i, n - i, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

}  // namespace pdrf::kernels::avx2

#else  // !PDRF_BUILD_AVX2

namespace pdrf::kernels::avx2 {

bool available() { return false; }

// Stubs keep the dispatcher linkable on non-x86 builds; never called.
void gemm_nt(const float*, const float*, float*, size_t, size_t, size_t, float) {}
void gemm_nn(const float*, const float*, float*, size_t, size_t, size_t, float) {}
void gemm_tn_acc(const float*, const float*, float*, size_t, size_t, size_t) {}
void add_bias_rows(float*, const float*, size_t, size_t) {}
void colsum_acc(const float*, float*, size_t, size_t) {}
void relu(const float*, float*, size_t) {}
void relu_backward(const float*, const float*, float*, size_t) {}
float dot(const float*, const float*, size_t) { return 0.f; }
void axpy(float, const float*, float*, size_t) {}
void scale(float, float*, size_t) {}
void fill(float, float*, size_t) {}
void add(const float*, float*, size_t) {}
void weighted_rowsum(const float*, const float*, float*, size_t, size_t) {}
void adam_update(float*, const float*, float*, float*, size_t, float, float, float, float, float, float) {}

}  // namespace pdrf::kernels::avx2

#endif
