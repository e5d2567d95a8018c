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
#include "tagtrack/diffnet/network.hpp"

namespace tagtrack::objective {

struct LossWeights {
  double alpha = 1e-3;  // determinant penalty
  double beta = 1e-4;   // latent magnitude penalty
};

/// Mean squared error between tracked and predicted points,
/// (1/N) * sum((x'-x)^2 + (y'-y)^2).
double loss_pos(const std::vector<Vec2>& predicted, const std::vector<Vec2>& target);

/// (1/l) * sum(z_i^2)
double loss_latent(const std::vector<double>& z);

/// (1/N) * sum(|1 - det(J_i)|)
double loss_jacobian(const std::vector<diffnet::Mat2>& jacobians);

/// pos + alpha*jac + beta*latent
double total_loss(double pos, double jac, double latent, const LossWeights& weights);

}  // namespace tagtrack::objective
