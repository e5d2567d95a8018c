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
#include <functional>
#include <vector>

#include "tagtrack/core/types.hpp"
#include "tagtrack/diffnet/gradients.hpp"
#include "tagtrack/objective/adam.hpp"
#include "tagtrack/objective/losses.hpp"

namespace tagtrack::objective {

enum class JacobianSamplePolicy { supervision_points, random_interior };

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 4;
  int epochs = 14;
  std::uint64_t seed = 0;
  LossWeights weights;
  JacobianSamplePolicy jacobian_policy = JacobianSamplePolicy::supervision_points;
  int workers = 1;
};

struct EpochStats {
  int epoch = 0;
  double pos = 0.0, jac = 0.0, latent = 0.0, total = 0.0;
};

/// Everything needed to continue training exactly where it stopped. Epoch
/// shuffles and interior sampling derive from (seed, epoch) alone, so
/// resuming from (model, opt, next_epoch) reproduces the uninterrupted run.
template <typename T>
struct TrainState {
  diffnet::InrModel<T> model;
  OptimizerState<T> opt;
  int next_epoch = 0;
  std::vector<EpochStats> history;
};

template <typename T>
using EpochCallback = std::function<void(const TrainState<T>&, const EpochStats&)>;

/// One epoch visits every (case, target frame t>0) pair exactly once in
/// shuffled order; each batch element contributes forward + input-Jacobian
/// evaluations at the 168 reference points and one Adam update is taken per
/// batch. Deterministic given config.seed.
template <typename T>
TrainState<T> train(const std::vector<CaseRecord>& dataset, const TrainConfig& config,
                    const diffnet::InrConfig& arch, const EpochCallback<T>& on_epoch = {});

/// Resume: runs epochs [state.next_epoch, config.epochs).
template <typename T>
void train_continue(TrainState<T>& state, const std::vector<CaseRecord>& dataset,
                    const TrainConfig& config, const EpochCallback<T>& on_epoch = {});

extern template TrainState<float> train<float>(const std::vector<CaseRecord>&,
                                               const TrainConfig&, const diffnet::InrConfig&,
                                               const EpochCallback<float>&);
extern template TrainState<double> train<double>(const std::vector<CaseRecord>&,
                                                 const TrainConfig&, const diffnet::InrConfig&,
                                                 const EpochCallback<double>&);
extern template void train_continue<float>(TrainState<float>&, const std::vector<CaseRecord>&,
                                           const TrainConfig&, const EpochCallback<float>&);
extern template void train_continue<double>(TrainState<double>&, const std::vector<CaseRecord>&,
                                            const TrainConfig&, const EpochCallback<double>&);

}  // namespace tagtrack::objective
