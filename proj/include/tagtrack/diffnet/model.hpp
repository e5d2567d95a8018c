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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tagtrack/util/errors.hpp"

namespace tagtrack::diffnet {

/// Architecture hyperparameters. The displacement MLP has `hidden_layers`
/// sine layers of width `hidden_size` plus an affine 2-D output; the encoder
/// is a stack of 3x3 stride-2 convolutions followed by global average pooling
/// and an affine projection to `latent_size`; each sine layer gets its
/// multiplicative amplitudes from a one-hidden-layer ReLU perceptron.
struct InrConfig {
  int hidden_layers = 3;
  int hidden_size = 256;
  int latent_size = 32;
  double omega = 15.0;
  std::vector<int> encoder_channels = {16, 32, 64, 128, 256};
  int modulation_hidden = 256;
  int image_size = 128;

  static InrConfig paper() { return {}; }

  /// Small enough for exhaustive finite-difference checks.
  static InrConfig tiny() {
    InrConfig c;
    c.hidden_layers = 2;
    c.hidden_size = 8;
    c.latent_size = 4;
    c.encoder_channels = {4, 4, 8, 8, 8};
    c.modulation_hidden = 8;
    c.image_size = 32;
    return c;
  }

  int min_image_size() const { return 1 << static_cast<int>(encoder_channels.size()); }
  void validate() const;
};

enum class InitKind : std::uint8_t {
  zero,
  fan_in_uniform,    // +-1/sqrt(fan_in)
  sine_first,        // +-1/fan_in
  sine_hidden,       // +-sqrt(6/fan_in)/omega
};

struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  int fan_in = 0;
  InitKind init = InitKind::zero;
};

/// Canonical flat parameter ordering: encoder convolutions in order
/// (weight, bias per layer), encoder projection, MLP layers input to output
/// (weight, bias), then modulation networks by sine-layer index
/// (hidden weight, hidden bias, output weight, output bias). Gradient
/// vectors, optimizer state and checkpoints all share this layout.
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(const InrConfig& config);

  std::size_t total() const { return total_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(const std::string& name) const;

  // Cached offsets for the evaluation hot path.
  std::size_t conv_w(int layer) const { return conv_w_[layer]; }
  std::size_t conv_b(int layer) const { return conv_b_[layer]; }
  std::size_t proj_w() const { return proj_w_; }
  std::size_t proj_b() const { return proj_b_; }
  std::size_t mlp_w(int layer) const { return mlp_w_[layer]; }  // layer 0..hidden_layers-1
  std::size_t mlp_b(int layer) const { return mlp_b_[layer]; }
  std::size_t out_w() const { return out_w_; }
  std::size_t out_b() const { return out_b_; }
  std::size_t mod_hidden_w(int layer) const { return mod_hw_[layer]; }
  std::size_t mod_hidden_b(int layer) const { return mod_hb_[layer]; }
  std::size_t mod_out_w(int layer) const { return mod_ow_[layer]; }
  std::size_t mod_out_b(int layer) const { return mod_ob_[layer]; }

 private:
  std::vector<ParamBlock> blocks_;
  std::size_t total_ = 0;
  std::vector<std::size_t> conv_w_, conv_b_, mlp_w_, mlp_b_, mod_hw_, mod_hb_, mod_ow_, mod_ob_;
  std::size_t proj_w_ = 0, proj_b_ = 0, out_w_ = 0, out_b_ = 0;
};

/// All learnable parameters in one flat vector (canonical order) plus the
/// architecture that interprets them. Immutable during evaluation.
template <typename T>
struct InrModel {
  InrConfig config;
  ParamLayout layout;
  std::vector<T> params;

  const T* block_ptr(std::size_t offset) const { return params.data() + offset; }
  T* block_ptr(std::size_t offset) { return params.data() + offset; }
};

/// Deterministic initialization: first sine layer +-1/fan_in, remaining MLP
/// layers +-sqrt(6/fan_in)/omega, encoder and modulation layers
/// +-1/sqrt(fan_in), all biases zero. Draws happen in double in canonical
/// order and are cast to T, so float and double models share values.
template <typename T>
InrModel<T> init_model(std::uint64_t seed, const InrConfig& config);

extern template InrModel<float> init_model<float>(std::uint64_t, const InrConfig&);
extern template InrModel<double> init_model<double>(std::uint64_t, const InrConfig&);

}  // namespace tagtrack::diffnet
