// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdrf/kernels/kernels.hpp"
#include "pdrf/rng.hpp"
#include "pdrf/tensor.hpp"

namespace pdrf {

// Affine stack with rectifier activations on hidden layers and identity on
// the output. Weight k has shape (out_k x in_k), row-major.
template <typename T>
struct Mlp {
  std::vector<ParamTensor<T>> weights;
  std::vector<ParamTensor<T>> biases;

  int in_dim() const { return weights.empty() ? 0 : weights.front().shape[1]; }
  int out_dim() const { return weights.empty() ? 0 : weights.back().shape[0]; }
  int num_layers() const { return int(weights.size()); }

  // dims = [in, hidden..., out]; hidden weights uniform in
  // +-sqrt(6/(fan_in+fan_out)), biases zero.
  static Mlp make(const std::string& name, const std::vector<int>& dims, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least one layer");
    Mlp net;
    for (size_t k = 0; k + 1 < dims.size(); ++k) {
      const int fan_in = dims[k], fan_out = dims[k + 1];
      ParamTensor<T> w(name + ".w" + std::to_string(k), {fan_out, fan_in});
      const T bound = std::sqrt(T(6) / T(fan_in + fan_out));
      for (auto& v : w.values) v = T(rng.uniform(-double(bound), double(bound)));
      net.weights.push_back(std::move(w));
      net.biases.emplace_back(name + ".b" + std::to_string(k), std::vector<int>{fan_out});
    }
    return net;
  }

  // Zeroes the final affine layer so the net initially outputs its last bias.
  void zero_last_layer() {
    std::fill(weights.back().values.begin(), weights.back().values.end(), T(0));
    std::fill(biases.back().values.begin(), biases.back().values.end(), T(0));
  }

  void collect_params(std::vector<ParamTensor<T>*>& out) {
    for (size_t k = 0; k < weights.size(); ++k) {
      out.push_back(&weights[k]);
      out.push_back(&biases[k]);
    }
  }
};

template <typename T>
struct MlpCache {
  int rows = 0;
  std::vector<std::vector<T>> acts;    // acts[0] = input copy; acts[k+1] = layer k post-activation
  std::vector<std::vector<T>> preact;  // preact[k] = layer k pre-activation
  std::vector<T> scratch;              // backward dZ buffer
};

// X is rows x in_dim; returns a span over the cached output (rows x out_dim).
template <typename T>
std::span<const T> mlp_forward(const Mlp<T>& net, const T* x, int rows, MlpCache<T>& cache) {
  const int layers = net.num_layers();
  cache.rows = rows;
  cache.acts.resize(layers + 1);
  cache.preact.resize(layers);
  cache.acts[0].assign(x, x + size_t(rows) * net.in_dim());
  for (int k = 0; k < layers; ++k) {
    const auto& w = net.weights[k];
    const int in = w.shape[1], out = w.shape[0];
    auto& z = cache.preact[k];
    z.resize(size_t(rows) * out);
    kernels::gemm_nt(cache.acts[k].data(), w.values.data(), z.data(), rows, out, in, T(0));
    kernels::add_bias_rows(z.data(), net.biases[k].values.data(), rows, out);
    auto& a = cache.acts[k + 1];
    a.resize(z.size());
    if (k + 1 < layers) {
      kernels::relu(z.data(), a.data(), z.size());
    } else {
      a = z;  // identity output
    }
  }
  return std::span<const T>(cache.acts.back());
}

// dy is rows x out_dim. Accumulates parameter gradients into the sink and,
// when dx_acc is non-null, adds d(loss)/d(input) into it (rows x in_dim).
template <typename T>
void mlp_backward(Mlp<T>& net, const MlpCache<T>& cache, const T* dy, GradSink<T>& sink,
                  T* dx_acc = nullptr) {
  if (cache.rows == 0) throw std::logic_error("mlp_backward: no recorded forward pass");
  const int layers = net.num_layers();
  const int rows = cache.rows;
  std::vector<T> dz(dy, dy + size_t(rows) * net.out_dim());
  std::vector<T> da;
  for (int k = layers - 1; k >= 0; --k) {
    auto& w = net.weights[k];
    const int in = w.shape[1], out = w.shape[0];
    auto wg = sink.grad(w);
    auto bg = sink.grad(net.biases[k]);
    kernels::gemm_tn_acc(dz.data(), cache.acts[k].data(), wg.data(), out, in, rows);
    kernels::colsum_acc(dz.data(), bg.data(), rows, out);
    if (k == 0 && !dx_acc) break;
    da.resize(size_t(rows) * in);
    kernels::gemm_nn(dz.data(), w.values.data(), da.data(), rows, in, out, T(0));
    if (k == 0) {
      kernels::add(da.data(), dx_acc, da.size());
    } else {
      dz.resize(da.size());
      kernels::relu_backward(cache.preact[k - 1].data(), da.data(), dz.data(), da.size());
    }
  }
}

// Single-vector convenience wrappers.
template <typename T>
std::vector<T> mlp_forward(const Mlp<T>& net, std::span<const T> x, MlpCache<T>& cache) {
  if (int(x.size()) != net.in_dim())
    throw std::invalid_argument("mlp_forward: input length does not match in_dim");
  auto out = mlp_forward(net, x.data(), 1, cache);
  return std::vector<T>(out.begin(), out.end());
}

template <typename T>
std::vector<T> mlp_backward(Mlp<T>& net, const MlpCache<T>& cache, std::span<const T> dy,
                            GradSink<T>& sink) {
  std::vector<T> dx(net.in_dim(), T(0));
  mlp_backward(net, cache, dy.data(), sink, dx.data());
  return dx;
}

}  // namespace pdrf
