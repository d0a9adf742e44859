// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "pdrf/adam.hpp"

namespace pdrf {

namespace {

struct BatchItem {
  int view, px, py;
  uint64_t seed;
};

}  // namespace

TrainResult train(const SceneDataset& dataset, const TrainConfig& config,
                  const std::string& checkpoint_path,
                  const std::function<void(const TrainLogRow&)>& on_log) {
  using T = float;
  if (dataset.train.empty()) throw std::invalid_argument("train: dataset has no training views");
  if (config.kernel_size < 1 || config.n_coarse < 2 || config.batch_rays < 1)
    throw std::invalid_argument("train: need P >= 1, N_c >= 2, batch_rays >= 1");

  const ModelConfig mcfg = ModelConfig::from_train_config(config, int(dataset.train.size()));
  Rng init_rng(mix_seed(config.seed, 0x1217));
  TrainResult result{PdrfModel<T>::make(mcfg, init_rng), {}};
  PdrfModel<T>& model = result.model;
  const TrainViews<T> views = TrainViews<T>::from_dataset(dataset);

  Adam<T> optimizer;
  const int threads = std::max(1, config.threads);
  const int B = config.batch_rays;

  std::vector<ItemWorkspace<T>> workspaces(threads);
  std::vector<GradSink<T>> sinks;
  sinks.emplace_back();  // direct sink for single-threaded accumulation
  if (threads > 1) {
    sinks.clear();
    for (int w = 0; w < threads; ++w)
      sinks.emplace_back(std::span<ParamTensor<T>* const>(model.params));
  }

  std::vector<BatchItem> batch(B);
  std::vector<ItemLosses<T>> item_losses(B);

  for (int iter = 1; iter <= config.iterations; ++iter) {
    model.zero_all_grads();

    Rng batch_rng(mix_seed(config.seed, 0xba7c, uint64_t(iter)));
    for (int b = 0; b < B; ++b) {
      const int v = int(batch_rng.uniform_u32(uint32_t(views.cameras.size())));
      const int px = int(batch_rng.uniform_u32(uint32_t(views.cameras[v].width)));
      const int py = int(batch_rng.uniform_u32(uint32_t(views.cameras[v].height)));
      batch[b] = {v, px, py, mix_seed(config.seed, uint64_t(iter) * 0x10001u, uint64_t(b))};
    }

    const T scale = T(1) / T(B);
    auto run_span = [&](int ws_idx, int begin, int end) {
      for (int b = begin; b < end; ++b)
        item_losses[b] = process_item(model, views, batch[b].view, batch[b].px, batch[b].py,
                                      batch[b].seed, scale, true, workspaces[ws_idx],
                                      sinks[ws_idx]);
    };

    if (threads == 1) {
      run_span(0, 0, B);
    } else {
      for (auto& s : sinks) s.clear();
      std::vector<std::thread> pool;
      const int chunk = (B + threads - 1) / threads;
      for (int w = 0; w < threads; ++w) {
        const int begin = w * chunk;
        const int end = std::min(B, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_span, w, begin, end);
      }
      for (auto& t : pool) t.join();
      for (auto& s : sinks) s.reduce_into(std::span<ParamTensor<T>* const>(model.params));
    }

    double l_stage1 = 0, l_stage2 = 0, l_fine = 0;
    for (const auto& l : item_losses) {
      l_stage1 += double(l.stage1);
      l_stage2 += double(l.stage2);
      l_fine += double(l.fine);
    }
    l_stage1 /= B;
    l_stage2 /= B;
    l_fine /= B;

    // TV terms act directly on the factor grads (single-writer phase).
    GradSink<T> direct;
    const T tvw = T(config.tv_weight);
    const double l_tv_c = double(tv_loss(model.grid_coar));
    const double l_tv_f = double(tv_loss(model.grid_fine));
    if (tvw != T(0)) {
      tv_loss_backward(model.grid_coar, tvw, direct);
      tv_loss_backward(model.grid_fine, tvw, direct);
    }

    const double l_crr = l_stage1 + l_stage2;
    const double l_tv = config.tv_weight * (l_tv_c + l_tv_f);
    const double l_total = l_crr + l_fine + l_tv;
    if (!std::isfinite(l_total)) {
      const char* term = !std::isfinite(l_crr) ? "coarse photometric"
                         : (!std::isfinite(l_fine) ? "fine photometric" : "total variation");
      throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(iter) +
                               " (" + term + " term)");
    }

    const T decay = T(std::pow(config.lr_decay, double(iter) / double(config.iterations)));
    optimizer.step(std::span<ParamTensor<T>* const>(model.net_group), T(config.lr_net) * decay,
                   iter);
    optimizer.step(std::span<ParamTensor<T>* const>(model.grid_group), T(config.lr_grid) * decay,
                   iter);

    if (iter == 1 || iter == config.iterations ||
        (config.log_every > 0 && iter % config.log_every == 0)) {
      const TrainLogRow row{iter, l_crr, l_fine, l_tv, l_total};
      result.log.push_back(row);
      if (on_log) on_log(row);
    }
    if (!checkpoint_path.empty() && config.checkpoint_every > 0 &&
        iter % config.checkpoint_every == 0 && iter != config.iterations) {
      model.save(checkpoint_path);
    }
  }

  if (!checkpoint_path.empty()) {
    model.save(checkpoint_path);
    std::ofstream log_out(checkpoint_path + ".log.csv");
    log_out << train_log_csv(result.log);
  }
  return result;
}

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
  std::ostringstream out;
  out << "iteration,l_crr,l_fvr,l_tv,l_total\n";
  char buf[160];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%.8g,%.8g,%.8g,%.8g\n", r.iteration, r.l_crr, r.l_fvr,
                  r.l_tv, r.l_total);
    out << buf;
  }
  return out.str();
}

}  // namespace pdrf
