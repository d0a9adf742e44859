// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pdrf/image.hpp"

namespace pdrf {

// 10*log10(1/MSE) with MSE over all pixels and channels; identical images
// report the 99 dB sentinel cap.
double psnr(const Image& a, const Image& b);

// Single-scale structural similarity on luminance (channel mean): 11x11
// Gaussian window (sigma 1.5), stability constants K1=0.01, K2=0.03 at
// dynamic range 1, averaged over valid window positions.
double ssim(const Image& a, const Image& b);

struct MetricReport {
  struct Row {
    std::string view;
    double psnr;
    double ssim;
  };
  std::vector<Row> per_view;
  double mean_psnr = 0;
  double mean_ssim = 0;
};

std::string metric_report_csv(const MetricReport& r);
std::string metric_report_table(const MetricReport& r);

}  // namespace pdrf
