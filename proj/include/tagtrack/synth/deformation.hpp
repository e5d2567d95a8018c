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

namespace tagtrack::synth {

enum class DeformationMode {
  incompressible,    // r' = g(t) * sqrt(r^2 - k(t)); exactly area-preserving when g == 1
  wall_thickening,   // r' = r_epi + (r - r_epi) * (1 + w(t)); epicardium fixed, wall thickens
};

/// Closed-form left-ventricle-like deformation in normalized coordinates:
/// polar contraction and twist about `center`, a smooth temporal bump s(t)
/// with s(0)=0, s(t_es)=1, s(1)=end_recovery, plus translation drift
/// d(t) = s(t) * drift_amplitude. The incompressible mode with
/// area_scale_amplitude == 0 has det(dX'/dX) == 1 everywhere it is defined;
/// area_scale_amplitude > 0 shrinks local area by (1 - a*s(t))^2, standing in
/// for through-plane effects that make in-plane motion non-area-preserving.
struct AnalyticDeformation {
  Vec2 center{0.0, 0.0};
  double contraction_amplitude = 0.0;   // k_max, squared-radius decrement at peak
  double twist_amplitude = 0.0;         // radians at peak
  double peak_time = 0.35;              // t_es in (0,1)
  double end_recovery = 0.1;            // s(1)
  Vec2 drift_amplitude{0.0, 0.0};
  DeformationMode mode = DeformationMode::incompressible;
  double thickening_amplitude = 0.0;    // w at peak (wall_thickening mode)
  double epi_radius = 0.0;              // anchor radius (wall_thickening mode)
  double area_scale_amplitude = 0.0;    // a; 0 keeps det == 1 (incompressible mode)

  /// Raised-cosine bump: 0 at t=0, 1 at peak_time, end_recovery at t=1.
  double bump(double t) const;

  bool area_preserving() const {
    return mode == DeformationMode::incompressible && area_scale_amplitude == 0.0;
  }
};

/// Forward map at time t. Errors with "point inside collapse radius" when
/// r^2 < k(t) in the incompressible mode.
Vec2 deform_point(const AnalyticDeformation& def, Vec2 x, double t);

/// Exact closed-form inverse of deform_point (defined on the whole plane for
/// k >= 0).
Vec2 inverse_deform_point(const AnalyticDeformation& def, Vec2 xp, double t);

/// Closed-form spatial Jacobian of deform_point:
/// Rot(theta') * diag(dR/dr, R/r) * Rot(-theta). Returned row-major
/// {j00, j01, j10, j11}; det is exactly g(t)^2 in the incompressible mode.
std::array<double, 4> deform_jacobian(const AnalyticDeformation& def, Vec2 x, double t);

struct StrainPairValues {
  std::vector<double> circ;  // per cyclic spoke pair, ring-major
  std::vector<double> rad;   // per adjacent ring pair, spoke-major within ring
  double gcs = 0.0;
  double grs = 0.0;
};

/// Chord strains of the analytically deformed grid at time t against the
/// frame-0 grid, using the same ring/spoke pairing rule as the strain module
/// but computed purely from the closed-form map. `grid` is a single-frame
/// pixel-coordinate grid; image_size supplies the coordinate normalization.
StrainPairValues analytic_strain(const AnalyticDeformation& def, const LandmarkGrid& grid,
                                 double t, int image_size);

}  // namespace tagtrack::synth
