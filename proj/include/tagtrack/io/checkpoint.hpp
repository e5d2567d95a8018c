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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tagtrack/diffnet/model.hpp"

namespace tagtrack::io {

// Checkpoint file: text header (sizes, omega, arithmetic mode, canonical
// parameter ordering, CRC32 of the body), "END-HEADER\n", then the body of
// little-endian float32 parameters in canonical order, then optionally the
// Adam moments (two float32 arrays) for exact resume. docs/formats.md pins
// the bytes.

struct TrainStateBlob {
  std::vector<float> m, v;
  std::int64_t step = 0;
  int next_epoch = 0;
};

struct CheckpointMeta {
  diffnet::InrConfig config;
  std::string arithmetic_mode;  // "float32" | "float64"
  bool has_train_state = false;
};

/// Header-only read, for deciding the arithmetic mode before loading.
CheckpointMeta peek_checkpoint(const std::filesystem::path& path);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const diffnet::InrModel<T>& model,
                     const TrainStateBlob* train_state = nullptr);

template <typename T>
diffnet::InrModel<T> load_checkpoint(const std::filesystem::path& path,
                                     TrainStateBlob* train_state_out = nullptr);

extern template void save_checkpoint<float>(const std::filesystem::path&,
                                            const diffnet::InrModel<float>&,
                                            const TrainStateBlob*);
extern template void save_checkpoint<double>(const std::filesystem::path&,
                                             const diffnet::InrModel<double>&,
                                             const TrainStateBlob*);
extern template diffnet::InrModel<float> load_checkpoint<float>(const std::filesystem::path&,
                                                                TrainStateBlob*);
extern template diffnet::InrModel<double> load_checkpoint<double>(const std::filesystem::path&,
                                                                  TrainStateBlob*);

/// CRC32 (IEEE, reflected) used for payload integrity.
std::uint32_t crc32(const unsigned char* data, std::size_t n);

}  // namespace tagtrack::io
