// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdrf/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

namespace pdrf {

namespace {

constexpr char kMagic[4] = {'P', 'D', 'R', 'F'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_bytes(std::FILE* f, const void* data, size_t n, const std::string& path) {
  if (std::fwrite(data, 1, n, f) != n)
    throw std::runtime_error("checkpoint: short write to '" + path + "'");
}

void read_bytes(std::FILE* f, void* data, size_t n, const std::string& path) {
  if (std::fread(data, 1, n, f) != n)
    throw std::runtime_error("checkpoint: unexpected end of file in '" + path + "'");
}

void write_u32(std::FILE* f, uint32_t v, const std::string& path) {
  write_bytes(f, &v, sizeof v, path);
}

uint32_t read_u32(std::FILE* f, const std::string& path) {
  uint32_t v;
  read_bytes(f, &v, sizeof v, path);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<CheckpointRecord>& records) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  write_bytes(f.get(), kMagic, 4, path);
  write_u32(f.get(), kCheckpointVersion, path);
  for (const auto& r : records) {
    size_t count = 1;
    for (int d : r.shape) count *= size_t(d);
    if (count != r.values.size())
      throw std::invalid_argument("checkpoint: record '" + r.name + "' shape/value mismatch");
    write_u32(f.get(), uint32_t(r.name.size()), path);
    write_bytes(f.get(), r.name.data(), r.name.size(), path);
    write_u32(f.get(), uint32_t(r.shape.size()), path);
    for (int d : r.shape) write_u32(f.get(), uint32_t(d), path);
    write_bytes(f.get(), r.values.data(), r.values.size() * sizeof(float), path);
  }
  if (std::fflush(f.get()) != 0) throw std::runtime_error("checkpoint: flush failed for '" + path + "'");
}

std::vector<CheckpointRecord> read_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[4];
  read_bytes(f.get(), magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  const uint32_t version = read_u32(f.get(), path);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: version mismatch in '" + path + "' (got " +
                             std::to_string(version) + ", expected " +
                             std::to_string(kCheckpointVersion) + ")");
  std::vector<CheckpointRecord> records;
  for (;;) {
    uint32_t name_len;
    const size_t got = std::fread(&name_len, 1, sizeof name_len, f.get());
    if (got == 0) break;  // clean end of records
    if (got != sizeof name_len)
      throw std::runtime_error("checkpoint: unexpected end of file in '" + path + "'");
    CheckpointRecord r;
    r.name.resize(name_len);
    read_bytes(f.get(), r.name.data(), name_len, path);
    const uint32_t rank = read_u32(f.get(), path);
    size_t count = 1;
    r.shape.resize(rank);
    for (uint32_t i = 0; i < rank; ++i) {
      r.shape[i] = int(read_u32(f.get(), path));
      count *= size_t(r.shape[i]);
    }
    r.values.resize(count);
    read_bytes(f.get(), r.values.data(), count * sizeof(float), path);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace pdrf
