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

#include <vector>

#include "tagtrack/core/types.hpp"

namespace tagtrack {

/// Spatial coordinates in [-1,1]^2, time in [0,1].
struct NormalizedCoord {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Pixel index 0 -> -1, (image_size-1) -> +1, linear in between.
Vec2 normalize_coord(Vec2 px, int image_size);
Vec2 denormalize_coord(Vec2 norm, int image_size);

std::vector<Vec2> normalize_coords(const std::vector<Vec2>& px, int image_size);
std::vector<Vec2> denormalize_coords(const std::vector<Vec2>& norm, int image_size);

/// Frame index k -> k/(frame_count-1).
double normalize_time(int frame_index, int frame_count);

}  // namespace tagtrack
