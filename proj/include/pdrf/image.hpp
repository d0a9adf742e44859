// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace pdrf {

// Row-major float image, values in [0, 1]. channels is 1 or 3.
struct Image {
  int width = 0, height = 0, channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c) {
    data.assign(size_t(w) * h * c, 0.f);
  }

  float& at(int x, int y, int c) { return data[(size_t(y) * width + x) * channels + c]; }
  float at(int x, int y, int c) const { return data[(size_t(y) * width + x) * channels + c]; }
};

// PNG I/O. Grayscale or RGB; 8- or 16-bit. Reads map samples to [0,1] floats.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img, int bit_depth);

// Quantizes to k/255 (or k/65535) grid values, clamping to [0,1]; written
// PNGs of a quantized image read back bit-exactly.
Image quantized(const Image& img, int bit_depth);

// Min-max normalization for diagnostic maps; returns the (min, max) range.
std::pair<float, float> normalize_minmax(Image& img);

}  // namespace pdrf
