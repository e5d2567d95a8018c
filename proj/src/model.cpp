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

#include "tagtrack/diffnet/model.hpp"
#include "tagtrack/util/rng.hpp"

namespace tagtrack::diffnet {

void InrConfig::validate() const {
  if (hidden_layers < 1) throw DataError("InrConfig: hidden_layers must be >= 1");
  if (hidden_size < 1 || latent_size < 1 || modulation_hidden < 1)
    throw DataError("InrConfig: layer sizes must be positive");
  if (!(omega > 0.0)) throw DataError("InrConfig: omega must be positive");
  if (encoder_channels.empty()) throw DataError("InrConfig: encoder needs at least one layer");
  for (int c : encoder_channels)
    if (c < 1) throw DataError("InrConfig: encoder channels must be positive");
  if (image_size < min_image_size())
    throw DataError("InrConfig: image_size too small for " +
                    std::to_string(encoder_channels.size()) + " stride-2 layers");
}

ParamLayout::ParamLayout(const InrConfig& config) {
  config.validate();
  auto add = [this](const std::string& name, std::size_t size, int fan_in, InitKind init) {
    blocks_.push_back({name, total_, size, fan_in, init});
    total_ += size;
    return blocks_.back().offset;
  };

  int in_ch = 2;
  for (std::size_t l = 0; l < config.encoder_channels.size(); ++l) {
    const int out_ch = config.encoder_channels[l];
    const std::string base = "encoder.conv" + std::to_string(l + 1);
    conv_w_.push_back(add(base + ".weight", static_cast<std::size_t>(out_ch) * in_ch * 9,
                          in_ch * 9, InitKind::fan_in_uniform));
    conv_b_.push_back(add(base + ".bias", out_ch, 0, InitKind::zero));
    in_ch = out_ch;
  }
  proj_w_ = add("encoder.proj.weight", static_cast<std::size_t>(config.latent_size) * in_ch,
                in_ch, InitKind::fan_in_uniform);
  proj_b_ = add("encoder.proj.bias", config.latent_size, 0, InitKind::zero);

  const int L = config.hidden_size;
  for (int i = 0; i < config.hidden_layers; ++i) {
    const int fan_in = i == 0 ? 3 : L;
    const std::string base = "mlp.layer" + std::to_string(i + 1);
    mlp_w_.push_back(add(base + ".weight", static_cast<std::size_t>(L) * fan_in, fan_in,
                         i == 0 ? InitKind::sine_first : InitKind::sine_hidden));
    mlp_b_.push_back(add(base + ".bias", L, 0, InitKind::zero));
  }
  out_w_ = add("mlp.out.weight", static_cast<std::size_t>(2) * L, L, InitKind::sine_hidden);
  out_b_ = add("mlp.out.bias", 2, 0, InitKind::zero);

  const int H = config.modulation_hidden;
  for (int i = 0; i < config.hidden_layers; ++i) {
    const std::string base = "mod" + std::to_string(i + 1);
    mod_hw_.push_back(add(base + ".hidden.weight", static_cast<std::size_t>(H) * config.latent_size,
                          config.latent_size, InitKind::fan_in_uniform));
    mod_hb_.push_back(add(base + ".hidden.bias", H, 0, InitKind::zero));
    mod_ow_.push_back(add(base + ".out.weight", static_cast<std::size_t>(L) * H, H,
                          InitKind::fan_in_uniform));
    mod_ob_.push_back(add(base + ".out.bias", L, 0, InitKind::zero));
  }
}

const ParamBlock& ParamLayout::block(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return b;
  throw DataError("ParamLayout: no block named '" + name + "'");
}

template <typename T>
InrModel<T> init_model(std::uint64_t seed, const InrConfig& config) {
  InrModel<T> model;
  model.config = config;
  model.layout = ParamLayout(config);
  model.params.assign(model.layout.total(), T(0));

  Rng rng(seed);
  for (const auto& block : model.layout.blocks()) {
    double bound = 0.0;
    switch (block.init) {
      case InitKind::zero:
        continue;
      case InitKind::fan_in_uniform:
        // Kaiming-uniform bound; keeps activation scale through the relu
        // stacks so the latent code and modulation amplitudes start alive.
        bound = std::sqrt(6.0 / static_cast<double>(block.fan_in));
        break;
      case InitKind::sine_first:
        bound = 1.0 / static_cast<double>(block.fan_in);
        break;
      case InitKind::sine_hidden:
        bound = std::sqrt(6.0 / static_cast<double>(block.fan_in)) / config.omega;
        break;
    }
    T* p = model.params.data() + block.offset;
    for (std::size_t i = 0; i < block.size; ++i)
      p[i] = static_cast<T>(rng.uniform(-bound, bound));
  }
  return model;
}

template InrModel<float> init_model<float>(std::uint64_t, const InrConfig&);
template InrModel<double> init_model<double>(std::uint64_t, const InrConfig&);

}  // namespace tagtrack::diffnet
