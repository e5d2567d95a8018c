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

#include <cmath>

#include "tagtrack/core/coords.hpp"
#include "tagtrack/core/grid.hpp"

namespace tagtrack {

Vec2 normalize_coord(Vec2 px, int image_size) {
  const double half = 0.5 * (image_size - 1);
  return {px.x / half - 1.0, px.y / half - 1.0};
}

Vec2 denormalize_coord(Vec2 norm, int image_size) {
  const double half = 0.5 * (image_size - 1);
  return {(norm.x + 1.0) * half, (norm.y + 1.0) * half};
}

std::vector<Vec2> normalize_coords(const std::vector<Vec2>& px, int image_size) {
  if (image_size < 2) throw DataError("normalize_coords: image_size must be >= 2");
  if (px.empty()) throw DataError("normalize_coords: empty input");
  std::vector<Vec2> out;
  out.reserve(px.size());
  for (const auto& p : px) out.push_back(normalize_coord(p, image_size));
  return out;
}

std::vector<Vec2> denormalize_coords(const std::vector<Vec2>& norm, int image_size) {
  if (image_size < 2) throw DataError("denormalize_coords: image_size must be >= 2");
  if (norm.empty()) throw DataError("denormalize_coords: empty input");
  std::vector<Vec2> out;
  out.reserve(norm.size());
  for (const auto& p : norm) out.push_back(denormalize_coord(p, image_size));
  return out;
}

double normalize_time(int frame_index, int frame_count) {
  if (frame_count < 2) throw DataError("normalize_time: need at least 2 frames");
  return static_cast<double>(frame_index) / static_cast<double>(frame_count - 1);
}

LandmarkGrid make_landmark_grid(Vec2 center, double r_endo, double r_epi, int rings, int spokes) {
  if (!(r_endo > 0.0) || !(r_endo < r_epi))
    throw DataError("make_landmark_grid: need 0 < r_endo < r_epi");
  if (rings < 2) throw DataError("make_landmark_grid: rings must be >= 2");
  if (spokes < 3) throw DataError("make_landmark_grid: spokes must be >= 3");

  const double two_pi = 6.283185307179586476925286766559;
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(rings) * spokes);
  for (int j = 0; j < rings; ++j) {
    const double rho = r_endo + (r_epi - r_endo) * static_cast<double>(j) / (rings - 1);
    for (int k = 0; k < spokes; ++k) {
      const double theta = two_pi * static_cast<double>(k) / spokes;
      pts.push_back({center.x + rho * std::cos(theta), center.y + rho * std::sin(theta)});
    }
  }
  return LandmarkGrid(rings, spokes, {std::move(pts)});
}

}  // namespace tagtrack
