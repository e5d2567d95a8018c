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
#include "tagtrack/synth/render.hpp"

namespace tagtrack::synth {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kLn2 = 0.69314718055994530941723212145818;
}  // namespace

Image render_frame(const AnalyticDeformation& def, const TagPattern& pattern, double t,
                   const RenderGeometry& geometry, Rng& rng) {
  const int s = geometry.image_size;
  if (s < 2) throw DataError("render_frame: image_size must be >= 2");
  if (!(geometry.r_endo_norm > 0.0) || !(geometry.r_endo_norm < geometry.r_epi_norm))
    throw DataError("render_frame: need 0 < r_endo < r_epi");

  Image img(s, s);
  const double fade = std::exp(-t * geometry.frame_count * kLn2 / pattern.fading_half_life_frames);
  const double cos_a = std::cos(pattern.grid_angle);
  const double sin_a = std::sin(pattern.grid_angle);
  const double freq = kTwoPi / pattern.tag_spacing_px;

  for (int row = 0; row < s; ++row) {
    for (int col = 0; col < s; ++col) {
      // pixel (col,row) -> material point via the exact inverse map
      const Vec2 pn = normalize_coord({static_cast<double>(col), static_cast<double>(row)}, s);
      const Vec2 mat = inverse_deform_point(def, pn, t);
      const double r_mat = std::hypot(mat.x - def.center.x, mat.y - def.center.y);

      double value;
      if (r_mat < geometry.r_endo_norm) {
        value = pattern.blood_intensity;
      } else if (r_mat <= geometry.r_epi_norm) {
        const Vec2 mat_px = denormalize_coord(mat, s);
        const double u = cos_a * mat_px.x + sin_a * mat_px.y;
        const double v = -sin_a * mat_px.x + cos_a * mat_px.y;
        const double tags = 0.25 * (1.0 + pattern.tag_contrast * std::cos(freq * u)) *
                            (1.0 + pattern.tag_contrast * std::cos(freq * v));
        value = pattern.myocardium_intensity * (fade * tags + (1.0 - fade));
      } else {
        value = pattern.background_intensity;
      }

      if (pattern.noise_sigma > 0.0) value += pattern.noise_sigma * rng.normal();
      img.at(row, col) = static_cast<float>(std::min(1.0, std::max(0.0, value)));
    }
  }
  return img;
}

}  // namespace tagtrack::synth
