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

#include "tagtrack/objective/losses.hpp"

namespace tagtrack::objective {

double loss_pos(const std::vector<Vec2>& predicted, const std::vector<Vec2>& target) {
  if (predicted.size() != target.size())
    throw DataError("loss_pos: cardinality mismatch (" + std::to_string(predicted.size()) +
                    " vs " + std::to_string(target.size()) + ")");
  if (predicted.empty()) throw DataError("loss_pos: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double dx = predicted[i].x - target[i].x;
    const double dy = predicted[i].y - target[i].y;
    acc += dx * dx + dy * dy;
  }
  return acc / static_cast<double>(predicted.size());
}

double loss_latent(const std::vector<double>& z) {
  if (z.empty()) throw DataError("loss_latent: empty latent");
  double acc = 0.0;
  for (const double v : z) acc += v * v;
  return acc / static_cast<double>(z.size());
}

double loss_jacobian(const std::vector<diffnet::Mat2>& jacobians) {
  if (jacobians.empty()) throw DataError("loss_jacobian: empty input");
  double acc = 0.0;
  for (const auto& j : jacobians) acc += std::abs(1.0 - j.det());
  return acc / static_cast<double>(jacobians.size());
}

double total_loss(double pos, double jac, double latent, const LossWeights& weights) {
  if (!std::isfinite(pos) || !std::isfinite(jac) || !std::isfinite(latent))
    throw NumericError("total_loss: non-finite part");
  return pos + weights.alpha * jac + weights.beta * latent;
}

}  // namespace tagtrack::objective
