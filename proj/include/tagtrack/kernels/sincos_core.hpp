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

#include <cmath>
#include <cstdint>

namespace tagtrack::kernels::detail {

// Single-precision sin/cos with 3-term Cody-Waite reduction and Cephes
// minimax polynomials. The AVX2 lane mirrors this exact fma sequence, so the
// two lanes agree bitwise. Valid for |x| <~ 1e4; the argument here is
// omega * preactivation, far below that in practice.
inline constexpr float kTwoOverPiF = 0.636619772367581343f;
inline constexpr float kPio2AF = 0.78515625f;
inline constexpr float kPio2BF = 2.4187564849853515625e-4f;
inline constexpr float kPio2CF = 3.77489497744594108e-8f;
inline constexpr float kSinC1F = -1.6666654611e-1f;
inline constexpr float kSinC2F = 8.3321608736e-3f;
inline constexpr float kSinC3F = -1.9515295891e-4f;
inline constexpr float kCosC1F = 4.166664568298827e-2f;
inline constexpr float kCosC2F = -1.388731625493765e-3f;
inline constexpr float kCosC3F = 2.443315711809948e-5f;

inline void sincosf_core(float x, float& sin_out, float& cos_out) {
  const float j = std::nearbyintf(x * kTwoOverPiF);
  const int q = static_cast<int>(j) & 3;

  float r = std::fmaf(j, -kPio2AF, x);
  r = std::fmaf(j, -kPio2BF, r);
  r = std::fmaf(j, -kPio2CF, r);
  const float z = r * r;

  float sp = kSinC3F;
  sp = std::fmaf(sp, z, kSinC2F);
  sp = std::fmaf(sp, z, kSinC1F);
  sp = sp * z;
  const float s = std::fmaf(sp, r, r);

  float cp = kCosC3F;
  cp = std::fmaf(cp, z, kCosC2F);
  cp = std::fmaf(cp, z, kCosC1F);
  cp = cp * z;
  cp = cp * z;
  const float c = std::fmaf(z, -0.5f, 1.0f) + cp;

  const bool swap = (q & 1) != 0;
  const bool flip_sin = (q & 2) != 0;
  const bool flip_cos = ((q + 1) & 2) != 0;
  const float sv = swap ? c : s;
  const float cv = swap ? s : c;
  sin_out = flip_sin ? -sv : sv;
  cos_out = flip_cos ? -cv : cv;
}

}  // namespace tagtrack::kernels::detail
