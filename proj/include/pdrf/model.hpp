// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pdrf/blur.hpp"
#include "pdrf/checkpoint.hpp"
#include "pdrf/config.hpp"
#include "pdrf/grid.hpp"
#include "pdrf/renderer.hpp"

namespace pdrf {

// The shape/settings a checkpoint must carry to rebuild the model and render
// from it. Derived from TrainConfig plus the dataset's view count.
struct ModelConfig {
  int num_views = 0;
  int kernel_size = 5;
  int embed_dim = 32;
  int blur_hidden = 64;
  int feat_dim = 15;
  int pos_bands = 10;
  int dir_bands = 4;
  int coarse_hidden = 64;
  int fine_hidden = 256;
  std::array<int, 3> grid_channels{64, 16, 16};
  int coarse_res = 64;
  int fine_res = 128;
  std::array<double, 3> bounds_lo{-1, -1, -1};
  std::array<double, 3> bounds_hi{1, 1, 1};
  double near = 0, far = 1;
  int n_coarse = 64;
  int n_fine = 64;
  bool gamma_correct = true;
  int pbe_mode = 0;  // 0 full, 1 single, 2 off

  static ModelConfig from_train_config(const TrainConfig& t, int num_views) {
    ModelConfig m;
    m.num_views = num_views;
    m.kernel_size = t.kernel_size;
    m.embed_dim = t.embed_dim;
    m.blur_hidden = t.blur_hidden;
    m.feat_dim = t.feat_dim;
    m.pos_bands = t.pos_bands;
    m.dir_bands = t.dir_bands;
    m.coarse_hidden = t.coarse_hidden;
    m.fine_hidden = t.fine_hidden;
    m.grid_channels = t.grid_channels;
    m.coarse_res = t.coarse_res;
    m.fine_res = 2 * t.coarse_res;
    m.bounds_lo = t.bounds_lo;
    m.bounds_hi = t.bounds_hi;
    m.near = t.near;
    m.far = t.far;
    m.n_coarse = t.n_coarse;
    m.n_fine = t.n_fine;
    m.gamma_correct = t.gamma_correct;
    m.pbe_mode = t.pbe == "full" ? 0 : (t.pbe == "single" ? 1 : 2);
    return m;
  }

  std::vector<float> pack() const {
    return {float(num_views), float(kernel_size), float(embed_dim), float(blur_hidden),
            float(feat_dim), float(pos_bands), float(dir_bands), float(coarse_hidden),
            float(fine_hidden), float(grid_channels[0]), float(grid_channels[1]),
            float(grid_channels[2]), float(coarse_res), float(fine_res), float(bounds_lo[0]),
            float(bounds_lo[1]), float(bounds_lo[2]), float(bounds_hi[0]), float(bounds_hi[1]),
            float(bounds_hi[2]), float(near), float(far), float(n_coarse), float(n_fine),
            float(gamma_correct ? 1 : 0), float(pbe_mode)};
  }

  static ModelConfig unpack(const std::vector<float>& v) {
    if (v.size() != 26) throw std::runtime_error("checkpoint: bad meta.config record");
    ModelConfig m;
    int i = 0;
    m.num_views = int(v[i++]);
    m.kernel_size = int(v[i++]);
    m.embed_dim = int(v[i++]);
    m.blur_hidden = int(v[i++]);
    m.feat_dim = int(v[i++]);
    m.pos_bands = int(v[i++]);
    m.dir_bands = int(v[i++]);
    m.coarse_hidden = int(v[i++]);
    m.fine_hidden = int(v[i++]);
    m.grid_channels = {int(v[i]), int(v[i + 1]), int(v[i + 2])};
    i += 3;
    m.coarse_res = int(v[i++]);
    m.fine_res = int(v[i++]);
    m.bounds_lo = {double(v[i]), double(v[i + 1]), double(v[i + 2])};
    i += 3;
    m.bounds_hi = {double(v[i]), double(v[i + 1]), double(v[i + 2])};
    i += 3;
    m.near = double(v[i++]);
    m.far = double(v[i++]);
    m.n_coarse = int(v[i++]);
    m.n_fine = int(v[i++]);
    m.gamma_correct = v[i++] != 0.f;
    m.pbe_mode = int(v[i++]);
    return m;
  }
};

// The full trainable model: two feature grids, the coarse and fine radiance
// nets, and the blur predictor with its per-view state.
template <typename T>
struct PdrfModel {
  ModelConfig cfg;
  FeatureGrid<T> grid_coar;
  FeatureGrid<T> grid_fine;
  RadianceNets<T> coarse;
  RadianceNets<T> fine;
  BlurKernelState<T> blur;
  KernelPredictor<T> predictor;

  std::vector<ParamTensor<T>*> params;       // uid-ordered
  std::vector<ParamTensor<T>*> grid_group;   // stepped at the grid lr
  std::vector<ParamTensor<T>*> net_group;    // stepped at the net lr

  static PdrfModel make(const ModelConfig& cfg, Rng& rng) {
    PdrfModel m;
    m.cfg = cfg;
    Box<T> box;
    for (int a = 0; a < 3; ++a) {
      box.lo[a] = T(cfg.bounds_lo[a]);
      box.hi[a] = T(cfg.bounds_hi[a]);
    }
    const std::array<int, 3> cres{cfg.coarse_res, cfg.coarse_res, cfg.coarse_res};
    const std::array<int, 3> fres{cfg.fine_res, cfg.fine_res, cfg.fine_res};
    m.grid_coar = FeatureGrid<T>::make("grid.coar", cres, cfg.grid_channels, box, rng);
    m.grid_fine = FeatureGrid<T>::make("grid.fine", fres, cfg.grid_channels, box, rng);
    const EncodingSpec pos{cfg.pos_bands, true};
    const EncodingSpec dir{cfg.dir_bands, true};
    const int gdim = m.grid_coar.feature_dim();
    m.coarse = RadianceNets<T>::make("crr", gdim, cfg.coarse_hidden, cfg.feat_dim, pos, dir, rng);
    m.fine = RadianceNets<T>::make("fvr", 2 * gdim, cfg.fine_hidden, cfg.feat_dim, pos, dir, rng);
    m.blur = BlurKernelState<T>::make(cfg.num_views, cfg.kernel_size, cfg.embed_dim, rng);
    m.predictor = KernelPredictor<T>::make(cfg.embed_dim, cfg.feat_dim, cfg.blur_hidden,
                                           box.extent(), rng);
    m.register_params();
    return m;
  }

  void register_params() {
    params.clear();
    grid_group.clear();
    net_group.clear();
    grid_coar.collect_params(grid_group);
    grid_fine.collect_params(grid_group);
    coarse.collect_params(net_group);
    fine.collect_params(net_group);
    blur.collect_params(net_group);
    predictor.collect_params(net_group);
    for (auto* p : grid_group) params.push_back(p);
    for (auto* p : net_group) params.push_back(p);
    for (size_t i = 0; i < params.size(); ++i) params[i]->uid = int(i);
  }

  void zero_all_grads() {
    for (auto* p : params) p->zero_grads();
  }

  void save(const std::string& path) const {
    std::vector<CheckpointRecord> records;
    records.push_back({"meta.config", {int(cfg.pack().size())}, cfg.pack()});
    for (const auto* p : params) {
      CheckpointRecord r;
      r.name = p->name;
      r.shape = p->shape;
      r.values.assign(p->values.begin(), p->values.end());
      records.push_back(std::move(r));
    }
    write_checkpoint(path, records);
  }

  static PdrfModel load(const std::string& path) {
    const auto records = read_checkpoint(path);
    if (records.empty() || records[0].name != "meta.config")
      throw std::runtime_error("checkpoint '" + path + "': missing meta.config record");
    const ModelConfig cfg = ModelConfig::unpack(records[0].values);
    Rng rng(0);
    PdrfModel m = make(cfg, rng);
    for (size_t i = 1; i < records.size(); ++i) {
      const auto& r = records[i];
      ParamTensor<T>* target = nullptr;
      for (auto* p : m.params)
        if (p->name == r.name) {
          target = p;
          break;
        }
      if (!target) throw std::runtime_error("checkpoint '" + path + "': unknown tensor '" + r.name + "'");
      if (target->shape != r.shape)
        throw std::runtime_error("checkpoint '" + path + "': shape mismatch for '" + r.name + "'");
      for (size_t k = 0; k < r.values.size(); ++k) target->values[k] = T(r.values[k]);
    }
    return m;
  }
};

}  // namespace pdrf
