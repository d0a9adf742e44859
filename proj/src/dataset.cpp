// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdrf {

namespace {

constexpr const char* kHeader = "pdrf-manifest v1";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& dir, int line_no, const std::string& what) {
  throw std::runtime_error("manifest '" + dir + "/manifest.txt' line " + std::to_string(line_no) +
                           ": " + what);
}

}  // namespace

void write_manifest(const SceneDataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write '" + dir + "/manifest.txt'");
  out << kHeader << "\n";

  auto emit = [&](const SceneView& v, int bit_depth) {
    const auto& cam = v.camera;
    out << v.name;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << fmt_double(cam.rotation.m[r * 3 + c]);
      out << ' ' << fmt_double(r == 0 ? cam.origin.x : (r == 1 ? cam.origin.y : cam.origin.z));
    }
    out << ' ' << fmt_double(cam.focal) << ' ' << fmt_double(cam.cx) << ' ' << fmt_double(cam.cy);
    out << ' ' << v.blur.type;
    for (double p : v.blur.params) out << ' ' << fmt_double(p);
    out << "\n";
    write_png(dir + "/" + v.name + ".png", v.image, bit_depth);
  };

  for (const auto& v : ds.train) emit(v, 8);
  for (const auto& v : ds.held_out) emit(v, 16);
  if (!out) throw std::runtime_error("write failed for '" + dir + "/manifest.txt'");
}

SceneDataset read_manifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest.txt");
  if (!in) throw std::runtime_error("cannot open '" + dir + "/manifest.txt'");

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) parse_fail(dir, 1, "empty manifest");
  ++line_no;
  if (line != kHeader) parse_fail(dir, 1, "bad header (expected '" + std::string(kHeader) + "')");

  SceneDataset ds;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    SceneView v;
    if (!(ss >> v.name)) parse_fail(dir, line_no, "missing view name");

    double pose[12];
    for (int i = 0; i < 12; ++i)
      if (!(ss >> pose[i])) parse_fail(dir, line_no, "expected 12 pose floats");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) v.camera.rotation.m[r * 3 + c] = pose[r * 4 + c];
    v.camera.origin = {pose[3], pose[7], pose[11]};

    if (!(ss >> v.camera.focal >> v.camera.cx >> v.camera.cy))
      parse_fail(dir, line_no, "expected fx cx cy");
    if (!(ss >> v.blur.type)) parse_fail(dir, line_no, "expected blur type");
    if (v.blur.type != "none" && v.blur.type != "motion" && v.blur.type != "defocus" &&
        v.blur.type != "holdout")
      parse_fail(dir, line_no, "unknown blur type '" + v.blur.type + "'");
    double p;
    while (ss >> p) v.blur.params.push_back(p);

    const std::string img_path = dir + "/" + v.name + ".png";
    if (!std::filesystem::exists(img_path))
      throw std::runtime_error("manifest references missing image file '" + img_path + "'");
    v.image = read_png(img_path);
    v.camera.width = v.image.width;
    v.camera.height = v.image.height;

    if (v.blur.type == "holdout")
      ds.held_out.push_back(std::move(v));
    else
      ds.train.push_back(std::move(v));
  }
  return ds;
}

}  // namespace pdrf
