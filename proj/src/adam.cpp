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

#include "tagtrack/kernels/kernels.hpp"
#include "tagtrack/objective/adam.hpp"

namespace tagtrack::objective {

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, OptimizerState<T>& state,
               double learning_rate, const diffnet::ParamLayout& layout) {
  if (params.size() != grads.size() || params.size() != layout.total())
    throw DataError("adam_step: parameter/gradient/layout size mismatch");
  if (state.m.size() != params.size()) {
    if (state.step != 0) throw DataError("adam_step: optimizer state size mismatch");
    state.m.assign(params.size(), T(0));
    state.v.assign(params.size(), T(0));
  }
  if (!(learning_rate > 0.0)) throw DataError("adam_step: learning_rate must be positive");

  for (const auto& block : layout.blocks()) {
    const T* g = grads.data() + block.offset;
    for (std::size_t i = 0; i < block.size; ++i)
      if (!std::isfinite(static_cast<double>(g[i])))
        throw NumericError("adam_step: non-finite gradient in block " + block.name);
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  kernels::adam_update(params.data(), grads.data(), state.m.data(), state.v.data(),
                       params.size(), static_cast<T>(learning_rate),
                       static_cast<T>(state.beta1), static_cast<T>(state.beta2),
                       static_cast<T>(state.epsilon), static_cast<T>(bc1), static_cast<T>(bc2));
}

template void adam_step<float>(std::vector<float>&, const std::vector<float>&,
                               OptimizerState<float>&, double, const diffnet::ParamLayout&);
template void adam_step<double>(std::vector<double>&, const std::vector<double>&,
                                OptimizerState<double>&, double, const diffnet::ParamLayout&);

}  // namespace tagtrack::objective
