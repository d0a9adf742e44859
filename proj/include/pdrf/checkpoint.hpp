// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdrf {

inline constexpr uint32_t kCheckpointVersion = 1;

// One record of the checkpoint container: magic "PDRF", u32 version, then
// repeated (u32 name length, name bytes, u32 rank, u32 dims[rank],
// little-endian f32 values). Round-trips bit-exactly.
struct CheckpointRecord {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;
};

void write_checkpoint(const std::string& path, const std::vector<CheckpointRecord>& records);

// Throws std::runtime_error on bad magic, version mismatch, or truncation.
std::vector<CheckpointRecord> read_checkpoint(const std::string& path);

}  // namespace pdrf
