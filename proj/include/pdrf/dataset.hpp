// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "pdrf/scene.hpp"

namespace pdrf {

// On-disk dataset layout: <dir>/manifest.txt plus one PNG per view.
// Manifest: header line "pdrf-manifest v1", then one line per view of
// whitespace-separated fields:
//   name  r00 r01 r02 ox r10 r11 r12 oy r20 r21 r22 oz  fx cx cy  blur_type params...
// Floats are printed with 17 significant digits so they round-trip exactly.
// blur_type "holdout" marks the sharp evaluation views (16-bit PNGs);
// training views are 8-bit PNGs.
void write_manifest(const SceneDataset& ds, const std::string& dir);

// Throws std::runtime_error with the offending line number on parse errors
// and names any missing image file.
SceneDataset read_manifest(const std::string& dir);

}  // namespace pdrf
