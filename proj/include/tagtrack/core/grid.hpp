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

namespace tagtrack {

/// Single-frame annular grid: ring radii linearly spaced from r_endo to
/// r_epi, spoke angles 2*pi*k/spokes. point(j,k) = center + rho_j *
/// (cos theta_k, sin theta_k). Units follow `center` and the radii (pixels).
LandmarkGrid make_landmark_grid(Vec2 center, double r_endo, double r_epi, int rings, int spokes);

}  // namespace tagtrack
