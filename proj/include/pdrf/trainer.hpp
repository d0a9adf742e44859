// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>

#include "pdrf/config.hpp"
#include "pdrf/dataset.hpp"
#include "pdrf/model.hpp"
#include "pdrf/pipeline.hpp"

namespace pdrf {

struct TrainLogRow {
  int iteration;
  double l_crr, l_fvr, l_tv, l_total;
};

struct TrainResult {
  PdrfModel<float> model;
  std::vector<TrainLogRow> log;
};

// Runs the training loop at single precision. When checkpoint_path is
// non-empty, writes periodic checkpoints (config cadence) and the final one
// there, plus the loss log as CSV next to it (<path>.log.csv).
// Aborts with a descriptive error if the loss turns non-finite.
TrainResult train(const SceneDataset& dataset, const TrainConfig& config,
                  const std::string& checkpoint_path = {},
                  const std::function<void(const TrainLogRow&)>& on_log = {});

std::string train_log_csv(const std::vector<TrainLogRow>& log);

}  // namespace pdrf
