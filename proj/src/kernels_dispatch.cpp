// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace pdrf::kernels {

namespace {

Backend resolve_backend() {
  if (const char* env = std::getenv("PDRF_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2::available()) return Backend::avx2;
  }
  return avx2::available() ? Backend::avx2 : Backend::scalar;
}

const Backend g_backend = resolve_backend();

}  // namespace

Backend active_backend() { return g_backend; }

std::string_view backend_name() {
  return g_backend == Backend::avx2 ? "avx2" : "scalar";
}

#define PDRF_DISPATCH(fn, ...)                    \
  if (g_backend == Backend::avx2) {               \
    return avx2::fn(__VA_ARGS__);                 \
  }                                               \
  return ref::fn(__VA_ARGS__)

void gemm_nt(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta) {
  PDRF_DISPATCH(gemm_nt, a, b, c, m, n, k, beta);
}
void gemm_nn(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta) {
  PDRF_DISPATCH(gemm_nn, a, b, c, m, n, k, beta);
}
void gemm_tn_acc(const float* a, const float* b, float* c, size_t m, size_t n, size_t k) {
  PDRF_DISPATCH(gemm_tn_acc, a, b, c, m, n, k);
}
void add_bias_rows(float* y, const float* bias, size_t rows, size_t cols) {
  PDRF_DISPATCH(add_bias_rows, y, bias, rows, cols);
}
void colsum_acc(const float* y, float* out, size_t rows, size_t cols) {
  PDRF_DISPATCH(colsum_acc, y, out, rows, cols);
}
void relu(const float* z, float* a, size_t n) { PDRF_DISPATCH(relu, z, a, n); }
void relu_backward(const float* z, const float* da, float* dz, size_t n) {
  PDRF_DISPATCH(relu_backward, z, da, dz, n);
}
float dot(const float* x, const float* y, size_t n) { PDRF_DISPATCH(dot, x, y, n); }
void axpy(float alpha, const float* x, float* y, size_t n) { PDRF_DISPATCH(axpy, alpha, x, y, n); }
void scale(float alpha, float* x, size_t n) { PDRF_DISPATCH(scale, alpha, x, n); }
void fill(float v, float* x, size_t n) { PDRF_DISPATCH(fill, v, x, n); }
void add(const float* x, float* y, size_t n) { PDRF_DISPATCH(add, x, y, n); }
void weighted_rowsum(const float* f, const float* w, float* out, size_t rows, size_t cols) {
  PDRF_DISPATCH(weighted_rowsum, f, w, out, rows, cols);
}
void adam_update(float* p, const float* g, float* m, float* v, size_t n,
                 float lr, float beta1, float beta2, float eps,
                 float inv_bc1, float inv_bc2) {
  PDRF_DISPATCH(adam_update, p, g, m, v, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

#undef PDRF_DISPATCH

// Double precision: scalar reference only.
void gemm_nt(const double* a, const double* b, double* c, size_t m, size_t n, size_t k, double beta) {
  ref::gemm_nt(a, b, c, m, n, k, beta);
}
void gemm_nn(const double* a, const double* b, double* c, size_t m, size_t n, size_t k, double beta) {
  ref::gemm_nn(a, b, c, m, n, k, beta);
}
void gemm_tn_acc(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  ref::gemm_tn_acc(a, b, c, m, n, k);
}
void add_bias_rows(double* y, const double* bias, size_t rows, size_t cols) {
  ref::add_bias_rows(y, bias, rows, cols);
}
void colsum_acc(const double* y, double* out, size_t rows, size_t cols) {
  ref::colsum_acc(y, out, rows, cols);
}
void relu(const double* z, double* a, size_t n) { ref::relu(z, a, n); }
void relu_backward(const double* z, const double* da, double* dz, size_t n) {
  ref::relu_backward(z, da, dz, n);
}
double dot(const double* x, const double* y, size_t n) { return ref::dot(x, y, n); }
void axpy(double alpha, const double* x, double* y, size_t n) { ref::axpy(alpha, x, y, n); }
void scale(double alpha, double* x, size_t n) { ref::scale(alpha, x, n); }
void fill(double v, double* x, size_t n) { ref::fill(v, x, n); }
void add(const double* x, double* y, size_t n) { ref::add(x, y, n); }
void weighted_rowsum(const double* f, const double* w, double* out, size_t rows, size_t cols) {
  ref::weighted_rowsum(f, w, out, rows, cols);
}
void adam_update(double* p, const double* g, double* m, double* v, size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double inv_bc1, double inv_bc2) {
  ref::adam_update(p, g, m, v, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

}  // namespace pdrf::kernels
