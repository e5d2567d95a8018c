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
#include <vector>

#include "tagtrack/core/types.hpp"

namespace tagtrack::io {

// 8-bit indexed BMP: palette entries 0..239 are a grayscale ramp for the
// image, 240..247 a fixed 8-color class palette (reference points, predicted
// points, endocardial ring markers, center, annotation colors). Lossless and
// byte-deterministic for golden-file testing.

inline constexpr unsigned char kOverlayClassRef = 240;
inline constexpr unsigned char kOverlayClassPred = 241;
inline constexpr unsigned char kOverlayClassRefEndo = 242;
inline constexpr unsigned char kOverlayClassPredEndo = 243;
inline constexpr unsigned char kOverlayClassCenter = 244;
inline constexpr unsigned char kOverlayClassRing = 245;
inline constexpr unsigned char kOverlayClassSpoke = 246;
inline constexpr unsigned char kOverlayClassText = 247;

/// Draws reference and predicted points (3x3 crosses; endocardial ring in
/// its own colors when rings/spokes are given) over the background frame.
void write_overlay_bmp(const std::filesystem::path& path, const Image& background,
                       const std::vector<Vec2>& ref_points, const std::vector<Vec2>& pred_points,
                       int spokes = 0);

/// In-memory encoding, exposed for tests.
std::vector<unsigned char> encode_overlay_bmp(const Image& background,
                                              const std::vector<Vec2>& ref_points,
                                              const std::vector<Vec2>& pred_points,
                                              int spokes = 0);

}  // namespace tagtrack::io
