// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the math core. Single-precision entry
// points route through a dispatch table resolved once at startup (scalar or
// AVX2, overridable with PDRF_KERNEL_BACKEND=scalar|avx2). Double-precision
// overloads always take the scalar reference path; they exist for the
// 64-bit verification mode where exactness matters and speed does not.
//
// Matrix arguments are dense row-major.

namespace pdrf::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
std::string_view backend_name();

// c(m x n) = beta * c + a(m x k) * b(n x k)^T
void gemm_nt(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta);
void gemm_nt(const double* a, const double* b, double* c, size_t m, size_t n, size_t k, double beta);

// c(m x n) = beta * c + a(m x k) * b(k x n)
void gemm_nn(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta);
void gemm_nn(const double* a, const double* b, double* c, size_t m, size_t n, size_t k, double beta);

// c(m x n) += a(k x m)^T * b(k x n)
void gemm_tn_acc(const float* a, const float* b, float* c, size_t m, size_t n, size_t k);
void gemm_tn_acc(const double* a, const double* b, double* c, size_t m, size_t n, size_t k);

// y[i][j] += bias[j]
void add_bias_rows(float* y, const float* bias, size_t rows, size_t cols);
void add_bias_rows(double* y, const double* bias, size_t rows, size_t cols);

// out[j] += sum_i y[i][j]
void colsum_acc(const float* y, float* out, size_t rows, size_t cols);
void colsum_acc(const double* y, double* out, size_t rows, size_t cols);

void relu(const float* z, float* a, size_t n);
void relu(const double* z, double* a, size_t n);

// dz[i] = da[i] * (z[i] > 0)
void relu_backward(const float* z, const float* da, float* dz, size_t n);
void relu_backward(const double* z, const double* da, double* dz, size_t n);

float dot(const float* x, const float* y, size_t n);
double dot(const double* x, const double* y, size_t n);

// y += alpha * x
void axpy(float alpha, const float* x, float* y, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);

void scale(float alpha, float* x, size_t n);
void scale(double alpha, double* x, size_t n);

void fill(float v, float* x, size_t n);
void fill(double v, double* x, size_t n);

// y += x
void add(const float* x, float* y, size_t n);
void add(const double* x, double* y, size_t n);

// out[j] = sum_i w[i] * f[i][j]
void weighted_rowsum(const float* f, const float* w, float* out, size_t rows, size_t cols);
void weighted_rowsum(const double* f, const double* w, double* out, size_t rows, size_t cols);

// Bias-corrected adaptive-moment update:
//   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
//   p -= lr * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
// inv_bc1/inv_bc2 are 1/(1-b1^t), 1/(1-b2^t) computed by the caller.
void adam_update(float* p, const float* g, float* m, float* v, size_t n,
                 float lr, float beta1, float beta2, float eps,
                 float inv_bc1, float inv_bc2);
void adam_update(double* p, const double* g, double* m, double* v, size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double inv_bc1, double inv_bc2);

// Scalar reference implementations, always available regardless of the
// active backend. The SIMD equivalence tests compare against these.
namespace ref {

template <typename T>
void gemm_nt(const T* a, const T* b, T* c, size_t m, size_t n, size_t k, T beta);
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, size_t m, size_t n, size_t k, T beta);
template <typename T>
void gemm_tn_acc(const T* a, const T* b, T* c, size_t m, size_t n, size_t k);
template <typename T>
void add_bias_rows(T* y, const T* bias, size_t rows, size_t cols);
template <typename T>
void colsum_acc(const T* y, T* out, size_t rows, size_t cols);
template <typename T>
void relu(const T* z, T* a, size_t n);
template <typename T>
void relu_backward(const T* z, const T* da, T* dz, size_t n);
template <typename T>
T dot(const T* x, const T* y, size_t n);
template <typename T>
void axpy(T alpha, const T* x, T* y, size_t n);
template <typename T>
void scale(T alpha, T* x, size_t n);
template <typename T>
void fill(T v, T* x, size_t n);
template <typename T>
void add(const T* x, T* y, size_t n);
template <typename T>
void weighted_rowsum(const T* f, const T* w, T* out, size_t rows, size_t cols);
template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, size_t n,
                 T lr, T beta1, T beta2, T eps, T inv_bc1, T inv_bc2);

}  // namespace ref

}  // namespace pdrf::kernels
