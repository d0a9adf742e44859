// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace pdrf {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("read_png: cannot open '" + path + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("read_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("read_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: decode error in '" + path + "'");
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // host is little-endian
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (channels != 1 && channels != 3)
    throw std::runtime_error("read_png: unsupported channel count in '" + path + "'");

  Image img(int(w), int(h), channels);
  std::vector<png_bytep> rows(h);
  const size_t stride = size_t(w) * channels * (depth / 8);
  std::vector<unsigned char> raw(stride * h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * stride;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  const size_t count = img.data.size();
  if (depth == 16) {
    const uint16_t* src = reinterpret_cast<const uint16_t*>(raw.data());
    for (size_t i = 0; i < count; ++i) img.data[i] = float(src[i]) / 65535.f;
  } else {
    for (size_t i = 0; i < count; ++i) img.data[i] = float(raw[i]) / 255.f;
  }
  return img;
}

void write_png(const std::string& path, const Image& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("write_png: bit depth must be 8 or 16");
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_png: channels must be 1 or 3");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("write_png: cannot open '" + path + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("write_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("write_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: encode error for '" + path + "'");
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, bit_depth,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  const size_t count = img.data.size();
  const float scale = bit_depth == 16 ? 65535.f : 255.f;
  if (bit_depth == 16) {
    std::vector<uint16_t> raw(count);
    for (size_t i = 0; i < count; ++i)
      raw[i] = uint16_t(std::lround(std::clamp(img.data[i], 0.f, 1.f) * scale));
    std::vector<png_bytep> rows(img.height);
    const size_t stride = size_t(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
      rows[y] = reinterpret_cast<png_bytep>(raw.data() + y * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  } else {
    std::vector<unsigned char> raw(count);
    for (size_t i = 0; i < count; ++i)
      raw[i] = (unsigned char)std::lround(std::clamp(img.data[i], 0.f, 1.f) * scale);
    std::vector<png_bytep> rows(img.height);
    const size_t stride = size_t(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) rows[y] = raw.data() + y * stride;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
}

Image quantized(const Image& img, int bit_depth) {
  const float scale = bit_depth == 16 ? 65535.f : 255.f;
  Image out = img;
  for (auto& v : out.data) v = float(std::lround(std::clamp(v, 0.f, 1.f) * scale)) / scale;
  return out;
}

std::pair<float, float> normalize_minmax(Image& img) {
  float lo = img.data.empty() ? 0.f : img.data[0];
  float hi = lo;
  for (float v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi > lo) {
    for (auto& v : img.data) v = (v - lo) / (hi - lo);
  } else {
    for (auto& v : img.data) v = 0.f;
  }
  return {lo, hi};
}

}  // namespace pdrf
