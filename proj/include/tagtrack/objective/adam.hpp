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
#include <vector>

#include "tagtrack/diffnet/model.hpp"

namespace tagtrack::objective {

/// First/second moment vectors aligned to the canonical parameter order plus
/// the step counter. Constants follow the usual Adam defaults.
template <typename T>
struct OptimizerState {
  std::vector<T> m;
  std::vector<T> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit OptimizerState(std::size_t n = 0) : m(n, T(0)), v(n, T(0)) {}
};

/// Standard bias-corrected Adam update, in place. Rejects non-finite
/// gradients with the name of the offending parameter block.
template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, OptimizerState<T>& state,
               double learning_rate, const diffnet::ParamLayout& layout);

extern template void adam_step<float>(std::vector<float>&, const std::vector<float>&,
                                      OptimizerState<float>&, double,
                                      const diffnet::ParamLayout&);
extern template void adam_step<double>(std::vector<double>&, const std::vector<double>&,
                                       OptimizerState<double>&, double,
                                       const diffnet::ParamLayout&);

}  // namespace tagtrack::objective
