// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace pdrf::kernels::avx2 {

bool available();

void gemm_nt(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta);
void gemm_nn(const float* a, const float* b, float* c, size_t m, size_t n, size_t k, float beta);
void gemm_tn_acc(const float* a, const float* b, float* c, size_t m, size_t n, size_t k);
void add_bias_rows(float* y, const float* bias, size_t rows, size_t cols);
void colsum_acc(const float* y, float* out, size_t rows, size_t cols);
void relu(const float* z, float* a, size_t n);
void relu_backward(const float* z, const float* da, float* dz, size_t n);
float dot(const float* x, const float* y, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void scale(float alpha, float* x, size_t n);
void fill(float v, float* x, size_t n);
void add(const float* x, float* y, size_t n);
void weighted_rowsum(const float* f, const float* w, float* out, size_t rows, size_t cols);
void adam_update(float* p, const float* g, float* m, float* v, size_t n,
                 float lr, float beta1, float beta2, float eps,
                 float inv_bc1, float inv_bc2);

}  // namespace pdrf::kernels::avx2
