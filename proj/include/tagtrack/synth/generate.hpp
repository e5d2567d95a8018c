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
#include <string>

#include "tagtrack/core/types.hpp"
#include "tagtrack/synth/render.hpp"

namespace tagtrack::synth {

/// Sampling ranges for one synthetic short-axis case. All [min,max] pairs are
/// uniform draws; radii and spacings in pixels, amplitudes in normalized
/// units where noted.
struct SynthConfig {
  int frame_count = 20;
  int image_size = 128;
  int rings = 7;
  int spokes = 24;
  double pixel_spacing_mm = 1.0;
  DeformationMode mode = DeformationMode::incompressible;

  double center_jitter_px = 5.0;
  double r_endo_px_min = 17.0, r_endo_px_max = 23.0;
  double wall_px_min = 10.0, wall_px_max = 15.0;
  // fractional mid-wall radius shrink at peak (incompressible mode)
  double contraction_min = 0.12, contraction_max = 0.22;
  double twist_abs_max = 0.25;  // radians
  double t_es_min = 0.30, t_es_max = 0.40;
  double end_recovery_min = 0.00, end_recovery_max = 0.15;
  double drift_px_max = 2.0;  // per component
  // radial stretch at peak (wall_thickening mode)
  double thickening_min = 0.10, thickening_max = 0.20;
  // in-plane area factor amplitude; > 0 makes the truth non-area-preserving
  double area_scale_min = 0.0, area_scale_max = 0.0;

  double tag_spacing_min = 6.0, tag_spacing_max = 10.0;
  double contrast_min = 0.6, contrast_max = 1.0;
  double half_life_min = 8.0, half_life_max = 20.0;
  double noise_min = 0.01, noise_max = 0.04;
  double myo_min = 0.75, myo_max = 0.95;
  double blood_min = 0.25, blood_max = 0.45;
  double bg_min = 0.02, bg_max = 0.10;
  bool randomize_grid_angle = true;

  int max_retries = 100;
};

/// Pure function of (seed, config): samples a deformation and tag pattern,
/// builds the frame-0 ring/spoke grid, computes exact landmark trajectories
/// and renders all frames. Resamples (bounded) when a draw violates the
/// collapse-radius constraint.
CaseRecord generate_case(std::uint64_t seed, const SynthConfig& config,
                         const std::string& case_id);

}  // namespace tagtrack::synth
