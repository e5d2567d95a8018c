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

#include "tagtrack/core/types.hpp"
#include "tagtrack/synth/deformation.hpp"
#include "tagtrack/util/rng.hpp"

namespace tagtrack::synth {

/// SPAMM-like multiplicative cosine tag grid with exponential fading.
struct TagPattern {
  double tag_spacing_px = 8.0;          // lambda
  double tag_contrast = 1.0;            // B in (0,1]
  double fading_half_life_frames = 12.0;
  double noise_sigma = 0.02;
  double myocardium_intensity = 0.9;
  double blood_intensity = 0.35;
  double background_intensity = 0.08;
  double grid_angle = 0.0;              // tag grid orientation, radians
};

struct RenderGeometry {
  int image_size = 128;
  int frame_count = 20;
  double r_endo_norm = 0.3;   // material annulus, normalized units
  double r_epi_norm = 0.5;
};

/// Pull-back rendering: every pixel is mapped to its material position via
/// the exact inverse deformation, classified against the material annulus
/// and shaded with the faded tag pattern. Gaussian noise is drawn row-major
/// from `rng`; intensities are clipped to [0,1].
Image render_frame(const AnalyticDeformation& def, const TagPattern& pattern, double t,
                   const RenderGeometry& geometry, Rng& rng);

}  // namespace tagtrack::synth
