// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/kernels/kernels.hpp"

#include <cmath>

namespace pdrf::kernels::ref {

template <typename T>
void gemm_nt(const T* a, const T* b, T* c, size_t m, size_t n, size_t k, T beta) {
  for (size_t i = 0; i < m; ++i) {
    const T* ai = a + i * k;
    for (size_t j = 0; j < n; ++j) {
      const T* bj = b + j * k;
      T acc = 0;
      for (size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      c[i * n + j] = beta * c[i * n + j] + acc;
    }
  }
}

template <typename T>
void gemm_nn(const T* a, const T* b, T* c, size_t m, size_t n, size_t k, T beta) {
  for (size_t i = 0; i < m; ++i) {
    T* ci = c + i * n;
    if (beta == T(0)) {
      for (size_t j = 0; j < n; ++j) ci[j] = 0;
    } else if (beta != T(1)) {
      for (size_t j = 0; j < n; ++j) ci[j] *= beta;
    }
    for (size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      const T* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

template <typename T>
void gemm_tn_acc(const T* a, const T* b, T* c, size_t m, size_t n, size_t k) {
  for (size_t p = 0; p < k; ++p) {
    const T* ap = a + p * m;
    const T* bp = b + p * n;
    for (size_t i = 0; i < m; ++i) {
      const T av = ap[i];
      T* ci = c + i * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

template <typename T>
void add_bias_rows(T* y, const T* bias, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) y[i * cols + j] += bias[j];
}

template <typename T>
void colsum_acc(const T* y, T* out, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) out[j] += y[i * cols + j];
}

template <typename T>
void relu(const T* z, T* a, size_t n) {
  for (size_t i = 0; i < n; ++i) a[i] = z[i] > T(0) ? z[i] : T(0);
}

template <typename T>
void relu_backward(const T* z, const T* da, T* dz, size_t n) {
  for (size_t i = 0; i < n; ++i) dz[i] = z[i] > T(0) ? da[i] : T(0);
}

template <typename T>
T dot(const T* x, const T* y, size_t n) {
  T acc = 0;
  for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void scale(T alpha, T* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

template <typename T>
void fill(T v, T* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] = v;
}

template <typename T>
void add(const T* x, T* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += x[i];
}

template <typename T>
void weighted_rowsum(const T* f, const T* w, T* out, size_t rows, size_t cols) {
  for (size_t j = 0; j < cols; ++j) out[j] = 0;
  for (size_t i = 0; i < rows; ++i) {
    const T wi = w[i];
    const T* fi = f + i * cols;
    for (size_t j = 0; j < cols; ++j) out[j] += wi * fi[j];
  }
}

template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, size_t n,
                 T lr, T beta1, T beta2, T eps, T inv_bc1, T inv_bc2) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
    const T mhat = m[i] * inv_bc1;
    const T vhat = v[i] * inv_bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

#define PDRF_INSTANTIATE(T)                                                            \
  template void gemm_nt<T>(const T*, const T*, T*, size_t, size_t, size_t, T);         \
  template void gemm_nn<T>(const T*, const T*, T*, size_t, size_t, size_t, T);         \
  template void gemm_tn_acc<T>(const T*, const T*, T*, size_t, size_t, size_t);        \
  template void add_bias_rows<T>(T*, const T*, size_t, size_t);                        \
  template void colsum_acc<T>(const T*, T*, size_t, size_t);                           \
  template void relu<T>(const T*, T*, size_t);                                         \
  template void relu_backward<T>(const T*, const T*, T*, size_t);                      \
  template T dot<T>(const T*, const T*, size_t);                                       \
  template void axpy<T>(T, const T*, T*, size_t);                                      \
  template void scale<T>(T, T*, size_t);                                               \
  template void fill<T>(T, T*, size_t);                                                \
  template void add<T>(const T*, T*, size_t);                                          \
  template void weighted_rowsum<T>(const T*, const T*, T*, size_t, size_t);            \
  template void adam_update<T>(T*, const T*, T*, T*, size_t, T, T, T, T, T, T);

PDRF_INSTANTIATE(float)
PDRF_INSTANTIATE(double)

#undef PDRF_INSTANTIATE

}  // namespace pdrf::kernels::ref
