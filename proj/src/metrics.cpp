// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pdrf {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_shapes(const Image& a, const Image& b, const char* op) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument(std::string(op) + ": image shapes differ");
}

std::vector<double> luminance(const Image& img) {
  std::vector<double> out(size_t(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0;
      for (int c = 0; c < img.channels; ++c) acc += img.at(x, y, c);
      out[size_t(y) * img.width + x] = acc / img.channels;
    }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  check_shapes(a, b, "psnr");
  double mse = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    mse += d * d;
  }
  mse /= double(a.data.size());
  if (mse <= 0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b) {
  check_shapes(a, b, "ssim");
  if (a.width < kWin || a.height < kWin)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  double win[kWin][kWin];
  double wsum = 0;
  for (int i = 0; i < kWin; ++i)
    for (int j = 0; j < kWin; ++j) {
      const double di = i - (kWin - 1) / 2.0;
      const double dj = j - (kWin - 1) / 2.0;
      win[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      wsum += win[i][j];
    }
  for (int i = 0; i < kWin; ++i)
    for (int j = 0; j < kWin; ++j) win[i][j] /= wsum;

  const std::vector<double> la = luminance(a);
  const std::vector<double> lb = luminance(b);
  const int w = a.width, h = a.height;

  double acc = 0;
  long count = 0;
  for (int y = 0; y + kWin <= h; ++y) {
    for (int x = 0; x + kWin <= w; ++x) {
      double mu_a = 0, mu_b = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double wt = win[i][j];
          mu_a += wt * la[size_t(y + i) * w + (x + j)];
          mu_b += wt * lb[size_t(y + i) * w + (x + j)];
        }
      double var_a = 0, var_b = 0, cov = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double wt = win[i][j];
          const double da = la[size_t(y + i) * w + (x + j)] - mu_a;
          const double db = lb[size_t(y + i) * w + (x + j)] - mu_b;
          var_a += wt * da * da;
          var_b += wt * db * db;
          cov += wt * da * db;
        }
      const double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      acc += num / den;
      ++count;
    }
  }
  return acc / double(count);
}

std::string metric_report_csv(const MetricReport& r) {
  std::ostringstream out;
  out << "view,psnr,ssim\n";
  char buf[96];
  for (const auto& row : r.per_view) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f\n", row.view.c_str(), row.psnr, row.ssim);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean,%.6f,%.6f\n", r.mean_psnr, r.mean_ssim);
  out << buf;
  return out.str();
}

std::string metric_report_table(const MetricReport& r) {
  std::ostringstream out;
  char buf[96];
  out << "view          psnr(dB)    ssim\n";
  for (const auto& row : r.per_view) {
    std::snprintf(buf, sizeof buf, "%-12s  %8.3f  %6.4f\n", row.view.c_str(), row.psnr, row.ssim);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-12s  %8.3f  %6.4f\n", "mean", r.mean_psnr, r.mean_ssim);
  out << buf;
  return out.str();
}

}  // namespace pdrf
