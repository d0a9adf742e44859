// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "pdrf/rng.hpp"
#include "pdrf/tensor.hpp"

// Central-difference gradient checking (64-bit only). Analytic gradients must
// already be accumulated in each tensor's grad buffer; loss_fn re-evaluates
// the loss as a pure function of the current parameter values.

namespace fdcheck {

struct FdReport {
  int checked = 0;
  int failures = 0;
  double max_rel_err = 0;
  std::string worst;

  bool ok() const { return failures == 0; }
};

inline bool entry_ok(double analytic, double fd, double tol, double abs_floor, double* rel_out) {
  const double err = std::abs(analytic - fd);
  const double mag = std::max(std::abs(analytic), std::abs(fd));
  const double rel = mag > 0 ? err / mag : 0.0;
  *rel_out = rel;
  if (err <= abs_floor) return true;
  return rel <= tol;
}

// Checks up to max_per_tensor randomly chosen entries per tensor (all when
// max_per_tensor <= 0).
template <typename LossFn>
FdReport check_params(std::span<pdrf::ParamTensor<double>* const> params, LossFn&& loss_fn,
                      double step = 1e-4, double tol = 1e-3, double abs_floor = 1e-6,
                      int max_per_tensor = -1, uint64_t pick_seed = 7) {
  FdReport report;
  pdrf::Rng pick(pick_seed);
  for (auto* p : params) {
    const size_t n = p->size();
    std::vector<size_t> indices;
    if (max_per_tensor <= 0 || size_t(max_per_tensor) >= n) {
      indices.resize(n);
      for (size_t i = 0; i < n; ++i) indices[i] = i;
    } else {
      for (int k = 0; k < max_per_tensor; ++k) indices.push_back(pick.uniform_u32(uint32_t(n)));
    }
    for (size_t j : indices) {
      const double orig = p->values[j];
      p->values[j] = orig + step;
      const double lp = loss_fn();
      p->values[j] = orig - step;
      const double lm = loss_fn();
      p->values[j] = orig;
      const double fd = (lp - lm) / (2.0 * step);
      const double an = p->grad[j];
      double rel = 0;
      ++report.checked;
      if (!entry_ok(an, fd, tol, abs_floor, &rel)) {
        ++report.failures;
        if (rel >= report.max_rel_err) {
          char buf[256];
          std::snprintf(buf, sizeof buf, "%s[%zu]: analytic %.8g vs fd %.8g (rel %.3g)",
                        p->name.c_str(), j, an, fd, rel);
          report.worst = buf;
        }
      }
      report.max_rel_err = std::max(report.max_rel_err, rel);
    }
  }
  return report;
}

// Same, for a raw (value, analytic-gradient) array such as an op input.
template <typename LossFn>
FdReport check_values(double* values, const double* analytic, size_t n, LossFn&& loss_fn,
                      double step = 1e-4, double tol = 1e-3, double abs_floor = 1e-6) {
  FdReport report;
  for (size_t j = 0; j < n; ++j) {
    const double orig = values[j];
    values[j] = orig + step;
    const double lp = loss_fn();
    values[j] = orig - step;
    const double lm = loss_fn();
    values[j] = orig;
    const double fd = (lp - lm) / (2.0 * step);
    double rel = 0;
    ++report.checked;
    if (!entry_ok(analytic[j], fd, tol, abs_floor, &rel)) {
      ++report.failures;
      char buf[128];
      std::snprintf(buf, sizeof buf, "value[%zu]: analytic %.8g vs fd %.8g (rel %.3g)", j,
                    analytic[j], fd, rel);
      report.worst = buf;
    }
    report.max_rel_err = std::max(report.max_rel_err, rel);
  }
  return report;
}

}  // namespace fdcheck
