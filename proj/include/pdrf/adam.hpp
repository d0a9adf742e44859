// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdrf/kernels/kernels.hpp"
#include "pdrf/tensor.hpp"

namespace pdrf {

template <typename T>
struct AdamConfig {
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Adaptive-moment optimizer with bias correction. Moment state is indexed by
// parameter uid, so one optimizer instance can serve several parameter
// groups stepped at different learning rates.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig<T> cfg = {}) : cfg_(cfg) {}

  // step_index starts at 1. Grads are left untouched; the caller zeroes them.
  void step(std::span<ParamTensor<T>* const> params, T lr, long step_index) {
    if (step_index < 1) throw std::invalid_argument("Adam: step_index starts at 1");
    const T inv_bc1 = T(1) / (T(1) - std::pow(cfg_.beta1, T(step_index)));
    const T inv_bc2 = T(1) / (T(1) - std::pow(cfg_.beta2, T(step_index)));
    for (auto* p : params) {
      for (const T g : p->grad) {
        if (!std::isfinite(double(g)))
          throw std::runtime_error("Adam: non-finite gradient in parameter '" + p->name + "'");
      }
      auto& slot = state_of(*p);
      kernels::adam_update(p->values.data(), p->grad.data(), slot.m.data(), slot.v.data(),
                           p->size(), lr, cfg_.beta1, cfg_.beta2, cfg_.eps, inv_bc1, inv_bc2);
    }
  }

 private:
  struct Slot {
    std::vector<T> m, v;
  };

  Slot& state_of(const ParamTensor<T>& p) {
    if (p.uid < 0) throw std::logic_error("Adam: parameter '" + p.name + "' is not registered");
    if (size_t(p.uid) >= slots_.size()) slots_.resize(p.uid + 1);
    auto& s = slots_[p.uid];
    if (s.m.empty()) {
      s.m.assign(p.size(), T(0));
      s.v.assign(p.size(), T(0));
    }
    return s;
  }

  AdamConfig<T> cfg_;
  std::vector<Slot> slots_;
};

}  // namespace pdrf
