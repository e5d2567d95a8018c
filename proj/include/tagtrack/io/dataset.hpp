/*
 * tagtrack : conditioned implicit neural representations for tagged-MRI motion tracking
 *
 * Copyright 2026 the tagtrack authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tagtrack/core/types.hpp"

namespace tagtrack::io {

inline constexpr int kDatasetFormatVersion = 1;

// Dataset directory layout:
//   manifest.json                      structured-text index (see docs/formats.md)
//   <case>.images.f32                  frames * H * W float32, little-endian,
//                                      frame-major row-major
//   <case>.landmarks.f32               frames * points * 2 float32 (x,y pairs),
//                                      frame-major point-major
// The manifest records byte lengths for every payload; loading verifies them
// and the format version.

/// Writes manifest + payloads. generator_echo (may be empty) is stored
/// verbatim in the manifest for provenance.
void write_dataset(const std::filesystem::path& dir, const std::vector<CaseRecord>& cases,
                   const std::string& generator_echo_json);

std::vector<CaseRecord> load_dataset(const std::filesystem::path& dir);

/// Predicted-track directory: per-case landmark payloads in the same binary
/// format plus a small JSON index.
void write_tracks(const std::filesystem::path& dir, const std::vector<std::string>& case_ids,
                  const std::vector<LandmarkGrid>& grids, int image_size,
                  const std::string& provenance_json);

struct TrackSet {
  std::vector<std::string> case_ids;
  std::vector<LandmarkGrid> grids;
  int image_size = 0;
};

TrackSet load_tracks(const std::filesystem::path& dir);

}  // namespace tagtrack::io
