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

namespace tagtrack::diffnet {

/// One conditioning pair with its tracked-point supervision, all coordinates
/// normalized. jac_points_norm selects where the determinant penalty is
/// evaluated; empty means "at the supervision points".
struct SupervisionSample {
  const Image* i0 = nullptr;
  const Image* it = nullptr;
  double t_norm = 0.0;
  std::vector<Vec2> points_norm;
  std::vector<Vec2> targets_norm;
  std::vector<Vec2> jac_points_norm;
};

struct LossBreakdown {
  double pos = 0.0;
  double jac = 0.0;
  double latent = 0.0;
  double total = 0.0;
};

/// Flat parameter gradient in the canonical layout order plus the loss that
/// produced it.
template <typename T>
struct GradientBundle {
  std::vector<T> grad;
  LossBreakdown losses;
};

/// Gradient of L = L_pos + alpha*L_J + beta*L_Z over a batch (batch-mean),
/// with the exact second-order pathway through det(J): the two spatial
/// tangent chains built in the forward pass are part of the reverse sweep.
/// Samples are reduced in index order regardless of worker count.
template <typename T>
GradientBundle<T> loss_gradients(const InrModel<T>& model,
                                 const std::vector<SupervisionSample>& batch, double alpha,
                                 double beta, int workers = 1);

extern template GradientBundle<float> loss_gradients<float>(
    const InrModel<float>&, const std::vector<SupervisionSample>&, double, double, int);
extern template GradientBundle<double> loss_gradients<double>(
    const InrModel<double>&, const std::vector<SupervisionSample>&, double, double, int);

/// Forward-only evaluation of the same batch loss (the function the
/// finite-difference harness probes).
template <typename T>
LossBreakdown loss_value(const InrModel<T>& model, const std::vector<SupervisionSample>& batch,
                         double alpha, double beta);

extern template LossBreakdown loss_value<float>(const InrModel<float>&,
                                                const std::vector<SupervisionSample>&, double,
                                                double);
extern template LossBreakdown loss_value<double>(const InrModel<double>&,
                                                 const std::vector<SupervisionSample>&, double,
                                                 double);

}  // namespace tagtrack::diffnet
