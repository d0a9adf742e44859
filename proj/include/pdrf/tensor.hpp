// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdrf {

// A named, shaped array of trainable values with a paired gradient buffer.
// values and grad always have identical shape.
template <typename T>
struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<T> values;
  std::vector<T> grad;
  int uid = -1;  // registry slot; assigned once the owning model collects its params

  ParamTensor() = default;
  ParamTensor(std::string n, std::vector<int> s) : name(std::move(n)), shape(std::move(s)) {
    values.assign(size(), T(0));
    grad.assign(size(), T(0));
  }

  size_t size() const {
    return std::accumulate(shape.begin(), shape.end(), size_t(1),
                           [](size_t a, int d) { return a * size_t(d); });
  }

  void zero_grads() { std::fill(grad.begin(), grad.end(), T(0)); }

  bool values_finite() const {
    for (const T& v : values)
      if (!std::isfinite(double(v))) return false;
    return true;
  }
};

template <typename T>
void zero_grads(std::span<ParamTensor<T>* const> params) {
  for (auto* p : params) p->zero_grads();
}

// Where backward passes accumulate parameter gradients. Direct mode writes
// into each tensor's own grad buffer; buffered mode gives a worker a private
// set of buffers (indexed by uid) that are reduced serially afterwards.
template <typename T>
class GradSink {
 public:
  GradSink() = default;

  explicit GradSink(std::span<ParamTensor<T>* const> params) : buffered_(true) {
    buffers_.resize(params.size());
    for (auto* p : params) {
      if (p->uid < 0 || size_t(p->uid) >= buffers_.size())
        throw std::logic_error("GradSink: parameter '" + p->name + "' is not registered");
      buffers_[p->uid].assign(p->size(), T(0));
    }
  }

  std::span<T> grad(ParamTensor<T>& p) {
    if (!buffered_) return std::span<T>(p.grad);
    return std::span<T>(buffers_[p.uid]);
  }

  void clear() {
    for (auto& b : buffers_) std::fill(b.begin(), b.end(), T(0));
  }

  // Adds this sink's private buffers into the tensors' grad arrays.
  void reduce_into(std::span<ParamTensor<T>* const> params) {
    if (!buffered_) return;
    for (auto* p : params) {
      const auto& b = buffers_[p->uid];
      for (size_t i = 0; i < b.size(); ++i) p->grad[i] += b[i];
    }
  }

 private:
  bool buffered_ = false;
  std::vector<std::vector<T>> buffers_;
};

}  // namespace pdrf
