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

#include <optional>
#include <vector>

#include "tagtrack/core/coords.hpp"
#include "tagtrack/core/types.hpp"
#include "tagtrack/diffnet/model.hpp"

namespace tagtrack::diffnet {

struct Mat2 {
  double j00 = 1.0, j01 = 0.0, j10 = 0.0, j11 = 1.0;
  double det() const { return j00 * j11 - j01 * j10; }
};

/// Displacement in normalized units; jacobian = d X'/d X = I + d u/d X when
/// requested (spatial derivatives only, time excluded).
struct DisplacementResult {
  Vec2 u;
  std::optional<Mat2> jacobian;
};

// ---------------------------------------------------------------------------
// Evaluation traces. Forward passes fill these; the backward pass in
// gradients.cpp reads them. Point batches are stored feature-major:
// [rows x N] row-major with one column per point.
// ---------------------------------------------------------------------------

template <typename T>
struct EncoderTrace {
  std::vector<T> input;                // 2 x S x S
  std::vector<std::vector<T>> cols;    // per conv layer, [Cin*9 x HW_out]
  std::vector<std::vector<T>> acts;    // per conv layer, post-relu [Cout x HW_out]
  std::vector<int> spatial;            // output size per layer
  std::vector<T> pooled;               // C_last
  std::vector<T> z;                    // latent
  bool keep_preacts = false;           // stash pre-relu values (gradcheck margins)
  std::vector<std::vector<T>> preacts;
};

template <typename T>
struct ModulationTrace {
  std::vector<std::vector<T>> hidden;  // per sine layer, post-relu [H]
  std::vector<std::vector<T>> amps;    // per sine layer, [L]
  bool keep_preacts = false;
  std::vector<std::vector<T>> preacts;
};

template <typename T>
struct MlpTrace {
  int n = 0;
  bool tangents = false;
  std::vector<T> g0;                          // 3 x N (x, y, t rows)
  std::vector<std::vector<T>> sin_act;        // per layer, L x N : sin(omega*(Wg+b))
  std::vector<std::vector<T>> cos_act;        // per layer, L x N
  std::vector<std::vector<T>> h;              // per layer, L x N : a .* sin
  std::vector<std::vector<T>> tzx, tzy;       // per layer, L x N : W * tg
  std::vector<std::vector<T>> tsx, tsy;       // per layer, L x N : omega*cos .* tz
  std::vector<std::vector<T>> thx, thy;       // per layer, L x N : a .* ts
  std::vector<T> u;                           // 2 x N
  std::vector<T> tux, tuy;                    // 2 x N
};

// ---------------------------------------------------------------------------
// Engine-level passes (templated on arithmetic type)
// ---------------------------------------------------------------------------

/// Z = E(I_0, I_t); channel order is (I_0, I_t). Images must be square with
/// the configured size.
template <typename T>
void encoder_forward(const InrModel<T>& model, const Image& i0, const Image& it,
                     EncoderTrace<T>& trace);

/// a_i = M_i(Z) for every sine layer.
template <typename T>
void modulation_forward(const InrModel<T>& model, const T* z, ModulationTrace<T>& trace);

/// Batched displacement evaluation at normalized coordinates. xy holds 2 x N
/// (row 0 = x, row 1 = y); with_tangents additionally propagates the two
/// spatial tangent directions needed for input Jacobians.
template <typename T>
void mlp_forward(const InrModel<T>& model, const ModulationTrace<T>& mods, const T* xy, T t,
                 int n, bool with_tangents, MlpTrace<T>& trace);

// ---------------------------------------------------------------------------
// Double-precision convenience API used by the CLI, metrics and tests
// ---------------------------------------------------------------------------

template <typename T>
std::vector<double> encode(const InrModel<T>& model, const Image& i0, const Image& it);

template <typename T>
std::vector<std::vector<double>> modulate(const InrModel<T>& model,
                                          const std::vector<double>& z);

template <typename T>
DisplacementResult forward(const InrModel<T>& model, const NormalizedCoord& x,
                           const std::vector<double>& z);

template <typename T>
Mat2 input_jacobian(const InrModel<T>& model, const NormalizedCoord& x,
                    const std::vector<double>& z);

/// Batch of points at a common time; optionally with Jacobians.
template <typename T>
std::vector<DisplacementResult> forward_points(const InrModel<T>& model,
                                               const std::vector<Vec2>& points_norm, double t,
                                               const std::vector<double>& z,
                                               bool with_jacobians);

#define TAGTRACK_EXTERN_NETWORK(T)                                                            \
  extern template void encoder_forward<T>(const InrModel<T>&, const Image&, const Image&,     \
                                          EncoderTrace<T>&);                                  \
  extern template void modulation_forward<T>(const InrModel<T>&, const T*,                    \
                                             ModulationTrace<T>&);                            \
  extern template void mlp_forward<T>(const InrModel<T>&, const ModulationTrace<T>&,          \
                                      const T*, T, int, bool, MlpTrace<T>&);                  \
  extern template std::vector<double> encode<T>(const InrModel<T>&, const Image&,             \
                                                const Image&);                                \
  extern template std::vector<std::vector<double>> modulate<T>(const InrModel<T>&,            \
                                                               const std::vector<double>&);   \
  extern template DisplacementResult forward<T>(const InrModel<T>&, const NormalizedCoord&,   \
                                                const std::vector<double>&);                  \
  extern template Mat2 input_jacobian<T>(const InrModel<T>&, const NormalizedCoord&,          \
                                         const std::vector<double>&);                         \
  extern template std::vector<DisplacementResult> forward_points<T>(                          \
      const InrModel<T>&, const std::vector<Vec2>&, double, const std::vector<double>&, bool);

TAGTRACK_EXTERN_NETWORK(float)
TAGTRACK_EXTERN_NETWORK(double)

#undef TAGTRACK_EXTERN_NETWORK

namespace detail {
/// 3x3 stride-2 pad-1 lowering; cols is [cin*9 x hout*wout].
template <typename T>
void im2col_3x3s2(const T* in, int cin, int h, int w, T* cols);
/// Transpose of im2col: scatter-add columns back onto the input layout.
template <typename T>
void col2im_3x3s2(const T* cols, int cin, int h, int w, T* grad_in);
int conv_out_size(int in);
}  // namespace detail

}  // namespace tagtrack::diffnet
