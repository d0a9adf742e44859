// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace pdrf {

// Everything a training run needs beyond the dataset. Defaults are the
// paper-scale settings; the desk-scale fixtures override via config file.
struct TrainConfig {
  // blur model
  int kernel_size = 5;          // P
  std::string pbe = "full";     // full | single (first stage only) | off (central ray)
  int embed_dim = 32;           // view embedding size
  int blur_hidden = 64;

  // sampling
  int n_coarse = 64;
  int n_fine = 64;

  // radiance model
  int feat_dim = 15;
  int pos_bands = 10;
  int dir_bands = 4;
  int coarse_hidden = 64;
  int fine_hidden = 256;
  std::array<int, 3> grid_channels{64, 16, 16};
  int coarse_res = 64;          // per axis; the fine grid doubles it

  // world box and ray range (matches the shipped scene presets)
  std::array<double, 3> bounds_lo{-1.7, -1.7, -1.7};
  std::array<double, 3> bounds_hi{1.7, 1.7, 1.7};
  double near = 1.6;
  double far = 5.6;

  // optimization
  int batch_rays = 1024;
  int iterations = 3000;
  double tv_weight = 1e-3;
  bool gamma_correct = true;
  double lr_net = 5e-4;
  double lr_grid = 2e-2;
  double lr_decay = 0.1;        // final lr multiplier, exponential schedule
  uint64_t seed = 0;
  int threads = 1;

  // output cadence
  int log_every = 10;
  int checkpoint_every = 0;     // 0 = final checkpoint only
};

// Key-value text config ('key value' lines, '#' comments). Unknown keys and
// malformed values fail with the line number.
TrainConfig load_config_file(const std::string& path);

// Applies one key/value pair; throws std::invalid_argument on unknown keys
// or bad values.
void apply_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value);

// Round-trippable echo of the effective configuration.
std::string config_to_string(const TrainConfig& cfg);

}  // namespace pdrf
