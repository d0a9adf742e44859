// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdrf {

namespace {

int to_int(const std::string& v) {
  size_t pos = 0;
  const int r = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("expected integer, got '" + v + "'");
  return r;
}

double to_double(const std::string& v) {
  size_t pos = 0;
  const double r = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("expected number, got '" + v + "'");
  return r;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + v + "'");
}

}  // namespace

void apply_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "kernel_size") cfg.kernel_size = to_int(value);
  else if (key == "pbe") {
    if (value != "full" && value != "single" && value != "off")
      throw std::invalid_argument("pbe must be full|single|off");
    cfg.pbe = value;
  }
  else if (key == "embed_dim") cfg.embed_dim = to_int(value);
  else if (key == "blur_hidden") cfg.blur_hidden = to_int(value);
  else if (key == "n_coarse") cfg.n_coarse = to_int(value);
  else if (key == "n_fine") cfg.n_fine = to_int(value);
  else if (key == "feat_dim") cfg.feat_dim = to_int(value);
  else if (key == "pos_bands") cfg.pos_bands = to_int(value);
  else if (key == "dir_bands") cfg.dir_bands = to_int(value);
  else if (key == "coarse_hidden") cfg.coarse_hidden = to_int(value);
  else if (key == "fine_hidden") cfg.fine_hidden = to_int(value);
  else if (key == "grid_channels_x") cfg.grid_channels[0] = to_int(value);
  else if (key == "grid_channels_y") cfg.grid_channels[1] = to_int(value);
  else if (key == "grid_channels_z") cfg.grid_channels[2] = to_int(value);
  else if (key == "coarse_res") cfg.coarse_res = to_int(value);
  else if (key == "bounds_lo_x") cfg.bounds_lo[0] = to_double(value);
  else if (key == "bounds_lo_y") cfg.bounds_lo[1] = to_double(value);
  else if (key == "bounds_lo_z") cfg.bounds_lo[2] = to_double(value);
  else if (key == "bounds_hi_x") cfg.bounds_hi[0] = to_double(value);
  else if (key == "bounds_hi_y") cfg.bounds_hi[1] = to_double(value);
  else if (key == "bounds_hi_z") cfg.bounds_hi[2] = to_double(value);
  else if (key == "near") cfg.near = to_double(value);
  else if (key == "far") cfg.far = to_double(value);
  else if (key == "batch_rays") cfg.batch_rays = to_int(value);
  else if (key == "iterations") cfg.iterations = to_int(value);
  else if (key == "tv_weight") cfg.tv_weight = to_double(value);
  else if (key == "gamma_correct") cfg.gamma_correct = to_bool(value);
  else if (key == "lr_net") cfg.lr_net = to_double(value);
  else if (key == "lr_grid") cfg.lr_grid = to_double(value);
  else if (key == "lr_decay") cfg.lr_decay = to_double(value);
  else if (key == "seed") cfg.seed = uint64_t(std::stoull(value));
  else if (key == "threads") cfg.threads = to_int(value);
  else if (key == "log_every") cfg.log_every = to_int(value);
  else if (key == "checkpoint_every") cfg.checkpoint_every = to_int(value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  TrainConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string key, value, extra;
    if (!(ss >> key)) continue;  // blank line
    if (!(ss >> value) || (ss >> extra))
      throw std::runtime_error("config '" + path + "' line " + std::to_string(line_no) +
                               ": expected 'key value'");
    try {
      apply_config_entry(cfg, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config '" + path + "' line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return cfg;
}

std::string config_to_string(const TrainConfig& c) {
  std::ostringstream out;
  char buf[96];
  auto put_i = [&](const char* k, long v) {
    std::snprintf(buf, sizeof buf, "%s %ld\n", k, v);
    out << buf;
  };
  auto put_d = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s %.17g\n", k, v);
    out << buf;
  };
  put_i("kernel_size", c.kernel_size);
  out << "pbe " << c.pbe << "\n";
  put_i("embed_dim", c.embed_dim);
  put_i("blur_hidden", c.blur_hidden);
  put_i("n_coarse", c.n_coarse);
  put_i("n_fine", c.n_fine);
  put_i("feat_dim", c.feat_dim);
  put_i("pos_bands", c.pos_bands);
  put_i("dir_bands", c.dir_bands);
  put_i("coarse_hidden", c.coarse_hidden);
  put_i("fine_hidden", c.fine_hidden);
  put_i("grid_channels_x", c.grid_channels[0]);
  put_i("grid_channels_y", c.grid_channels[1]);
  put_i("grid_channels_z", c.grid_channels[2]);
  put_i("coarse_res", c.coarse_res);
  put_d("bounds_lo_x", c.bounds_lo[0]);
  put_d("bounds_lo_y", c.bounds_lo[1]);
  put_d("bounds_lo_z", c.bounds_lo[2]);
  put_d("bounds_hi_x", c.bounds_hi[0]);
  put_d("bounds_hi_y", c.bounds_hi[1]);
  put_d("bounds_hi_z", c.bounds_hi[2]);
  put_d("near", c.near);
  put_d("far", c.far);
  put_i("batch_rays", c.batch_rays);
  put_i("iterations", c.iterations);
  put_d("tv_weight", c.tv_weight);
  out << "gamma_correct " << (c.gamma_correct ? "true" : "false") << "\n";
  put_d("lr_net", c.lr_net);
  put_d("lr_grid", c.lr_grid);
  put_d("lr_decay", c.lr_decay);
  put_i("seed", long(c.seed));
  put_i("threads", c.threads);
  put_i("log_every", c.log_every);
  put_i("checkpoint_every", c.checkpoint_every);
  return out.str();
}

}  // namespace pdrf
