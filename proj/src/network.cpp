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
#include <cstring>

#include "tagtrack/diffnet/network.hpp"
#include "tagtrack/kernels/kernels.hpp"

namespace tagtrack::diffnet {

namespace detail {

int conv_out_size(int in) { return (in + 2 - 3) / 2 + 1; }

template <typename T>
void im2col_3x3s2(const T* in, int cin, int h, int w, T* cols) {
  const int hout = conv_out_size(h);
  const int wout = conv_out_size(w);
  const int hw_out = hout * wout;
  for (int c = 0; c < cin; ++c) {
    const T* plane = in + static_cast<std::size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw_out;
        for (int oy = 0; oy < hout; ++oy) {
          const int iy = oy * 2 + ky - 1;
          T* dst = row + static_cast<std::size_t>(oy) * wout;
          if (iy < 0 || iy >= h) {
            std::memset(dst, 0, sizeof(T) * wout);
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wout; ++ox) {
            const int ix = ox * 2 + kx - 1;
            dst[ox] = (ix < 0 || ix >= w) ? T(0) : src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_3x3s2(const T* cols, int cin, int h, int w, T* grad_in) {
  const int hout = conv_out_size(h);
  const int wout = conv_out_size(w);
  const int hw_out = hout * wout;
  for (int c = 0; c < cin; ++c) {
    T* plane = grad_in + static_cast<std::size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw_out;
        for (int oy = 0; oy < hout; ++oy) {
          const int iy = oy * 2 + ky - 1;
          if (iy < 0 || iy >= h) continue;
          const T* src = row + static_cast<std::size_t>(oy) * wout;
          T* dst = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wout; ++ox) {
            const int ix = ox * 2 + kx - 1;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

template void im2col_3x3s2<float>(const float*, int, int, int, float*);
template void im2col_3x3s2<double>(const double*, int, int, int, double*);
template void col2im_3x3s2<float>(const float*, int, int, int, float*);
template void col2im_3x3s2<double>(const double*, int, int, int, double*);

}  // namespace detail

namespace {

template <typename T>
void check_image(const Image& img, int expected, const char* which) {
  if (img.height != expected || img.width != expected)
    throw DataError(std::string("encode: ") + which + " must be " + std::to_string(expected) +
                    "x" + std::to_string(expected) + ", got " + std::to_string(img.height) + "x" +
                    std::to_string(img.width));
}

}  // namespace

template <typename T>
void encoder_forward(const InrModel<T>& model, const Image& i0, const Image& it,
                     EncoderTrace<T>& trace) {
  const auto& cfg = model.config;
  const int s = cfg.image_size;
  check_image<T>(i0, s, "I_0");
  check_image<T>(it, s, "I_t");

  const std::size_t plane = static_cast<std::size_t>(s) * s;
  trace.input.resize(2 * plane);
  for (std::size_t i = 0; i < plane; ++i) trace.input[i] = static_cast<T>(i0.pixels[i]);
  for (std::size_t i = 0; i < plane; ++i) trace.input[plane + i] = static_cast<T>(it.pixels[i]);

  const int layers = static_cast<int>(cfg.encoder_channels.size());
  trace.cols.resize(layers);
  trace.acts.resize(layers);
  trace.spatial.resize(layers);

  const T* in = trace.input.data();
  int in_ch = 2, in_size = s;
  for (int l = 0; l < layers; ++l) {
    const int out_ch = cfg.encoder_channels[l];
    const int out_size = detail::conv_out_size(in_size);
    const int hw_out = out_size * out_size;
    auto& cols = trace.cols[l];
    auto& act = trace.acts[l];
    cols.resize(static_cast<std::size_t>(in_ch) * 9 * hw_out);
    act.resize(static_cast<std::size_t>(out_ch) * hw_out);

    detail::im2col_3x3s2(in, in_ch, in_size, in_size, cols.data());
    kernels::gemm_nn(model.block_ptr(model.layout.conv_w(l)), cols.data(), act.data(), out_ch,
                     in_ch * 9, hw_out, false);
    kernels::add_row_bias(act.data(), model.block_ptr(model.layout.conv_b(l)), out_ch, hw_out);
    if (trace.keep_preacts) {
      trace.preacts.resize(layers);
      trace.preacts[l] = act;
    }
    kernels::relu(act.data(), act.data(), act.size());

    trace.spatial[l] = out_size;
    in = act.data();
    in_ch = out_ch;
    in_size = out_size;
  }

  // global average pool then affine projection to the latent code
  const int c_last = in_ch;
  const int hw = in_size * in_size;
  trace.pooled.resize(c_last);
  const auto& last = trace.acts.back();
  for (int c = 0; c < c_last; ++c)
    trace.pooled[c] =
        kernels::reduce_sum(last.data() + static_cast<std::size_t>(c) * hw, hw) / static_cast<T>(hw);

  trace.z.assign(cfg.latent_size, T(0));
  kernels::gemm_nn(model.block_ptr(model.layout.proj_w()), trace.pooled.data(), trace.z.data(),
                   cfg.latent_size, c_last, 1, false);
  const T* pb = model.block_ptr(model.layout.proj_b());
  for (int i = 0; i < cfg.latent_size; ++i) trace.z[i] += pb[i];
}

template <typename T>
void modulation_forward(const InrModel<T>& model, const T* z, ModulationTrace<T>& trace) {
  const auto& cfg = model.config;
  const int H = cfg.modulation_hidden;
  const int L = cfg.hidden_size;
  trace.hidden.resize(cfg.hidden_layers);
  trace.amps.resize(cfg.hidden_layers);
  for (int i = 0; i < cfg.hidden_layers; ++i) {
    auto& r = trace.hidden[i];
    auto& a = trace.amps[i];
    r.assign(H, T(0));
    a.assign(L, T(0));
    kernels::gemm_nn(model.block_ptr(model.layout.mod_hidden_w(i)), z, r.data(), H,
                     cfg.latent_size, 1, false);
    const T* hb = model.block_ptr(model.layout.mod_hidden_b(i));
    for (int j = 0; j < H; ++j) r[j] += hb[j];
    if (trace.keep_preacts) {
      trace.preacts.resize(cfg.hidden_layers);
      trace.preacts[i] = r;
    }
    kernels::relu(r.data(), r.data(), r.size());
    kernels::gemm_nn(model.block_ptr(model.layout.mod_out_w(i)), r.data(), a.data(), L, H, 1,
                     false);
    const T* ob = model.block_ptr(model.layout.mod_out_b(i));
    for (int j = 0; j < L; ++j) a[j] += ob[j];
  }
}

template <typename T>
void mlp_forward(const InrModel<T>& model, const ModulationTrace<T>& mods, const T* xy, T t,
                 int n, bool with_tangents, MlpTrace<T>& trace) {
  const auto& cfg = model.config;
  const int L = cfg.hidden_size;
  const int layers = cfg.hidden_layers;
  const T omega = static_cast<T>(cfg.omega);
  const std::size_t ln = static_cast<std::size_t>(L) * n;

  trace.n = n;
  trace.tangents = with_tangents;
  trace.g0.resize(3 * static_cast<std::size_t>(n));
  std::memcpy(trace.g0.data(), xy, sizeof(T) * 2 * n);
  for (int p = 0; p < n; ++p) trace.g0[2 * static_cast<std::size_t>(n) + p] = t;

  auto resize_all = [&](std::vector<std::vector<T>>& v) {
    v.resize(layers);
    for (auto& b : v) b.resize(ln);
  };
  resize_all(trace.sin_act);
  resize_all(trace.cos_act);
  resize_all(trace.h);
  if (with_tangents) {
    resize_all(trace.tzx);
    resize_all(trace.tzy);
    resize_all(trace.tsx);
    resize_all(trace.tsy);
    resize_all(trace.thx);
    resize_all(trace.thy);
  }

  std::vector<T> pre(ln);
  const T* g = trace.g0.data();
  int g_rows = 3;
  for (int i = 0; i < layers; ++i) {
    const T* w = model.block_ptr(model.layout.mlp_w(i));
    kernels::gemm_nn(w, g, pre.data(), L, g_rows, n, false);
    kernels::add_row_bias(pre.data(), model.block_ptr(model.layout.mlp_b(i)), L, n);
    kernels::sincos_scaled(pre.data(), omega, trace.sin_act[i].data(), trace.cos_act[i].data(),
                           ln);
    auto& h = trace.h[i];
    std::memcpy(h.data(), trace.sin_act[i].data(), sizeof(T) * ln);
    kernels::scale_rows(h.data(), mods.amps[i].data(), L, n);

    if (with_tangents) {
      // tangent rows for layer 0 are the constant unit directions, so the
      // first-layer products reduce to weight-column copies
      if (i == 0) {
        for (int l = 0; l < L; ++l) {
          const T wx = w[static_cast<std::size_t>(l) * 3 + 0];
          const T wy = w[static_cast<std::size_t>(l) * 3 + 1];
          T* zx = trace.tzx[i].data() + static_cast<std::size_t>(l) * n;
          T* zy = trace.tzy[i].data() + static_cast<std::size_t>(l) * n;
          for (int p = 0; p < n; ++p) {
            zx[p] = wx;
            zy[p] = wy;
          }
        }
      } else {
        kernels::gemm_nn(w, trace.thx[i - 1].data(), trace.tzx[i].data(), L, g_rows, n, false);
        kernels::gemm_nn(w, trace.thy[i - 1].data(), trace.tzy[i].data(), L, g_rows, n, false);
      }
      const T* cosv = trace.cos_act[i].data();
      for (std::size_t j = 0; j < ln; ++j)
        trace.tsx[i][j] = omega * (cosv[j] * trace.tzx[i][j]);
      for (std::size_t j = 0; j < ln; ++j)
        trace.tsy[i][j] = omega * (cosv[j] * trace.tzy[i][j]);
      std::memcpy(trace.thx[i].data(), trace.tsx[i].data(), sizeof(T) * ln);
      std::memcpy(trace.thy[i].data(), trace.tsy[i].data(), sizeof(T) * ln);
      kernels::scale_rows(trace.thx[i].data(), mods.amps[i].data(), L, n);
      kernels::scale_rows(trace.thy[i].data(), mods.amps[i].data(), L, n);
    }

    g = h.data();
    g_rows = L;
  }

  trace.u.resize(2 * static_cast<std::size_t>(n));
  const T* wout = model.block_ptr(model.layout.out_w());
  kernels::gemm_nn(wout, trace.h[layers - 1].data(), trace.u.data(), 2, L, n, false);
  kernels::add_row_bias(trace.u.data(), model.block_ptr(model.layout.out_b()), 2, n);
  if (with_tangents) {
    trace.tux.resize(2 * static_cast<std::size_t>(n));
    trace.tuy.resize(2 * static_cast<std::size_t>(n));
    kernels::gemm_nn(wout, trace.thx[layers - 1].data(), trace.tux.data(), 2, L, n, false);
    kernels::gemm_nn(wout, trace.thy[layers - 1].data(), trace.tuy.data(), 2, L, n, false);
  }
}

// ---------------------------------------------------------------------------
// double-precision convenience wrappers
// ---------------------------------------------------------------------------

namespace {

template <typename T>
std::vector<T> to_engine(const std::vector<double>& z, int expected, const char* what) {
  if (static_cast<int>(z.size()) != expected)
    throw DataError(std::string(what) + ": latent length " + std::to_string(z.size()) +
                    ", expected " + std::to_string(expected));
  std::vector<T> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<T>(z[i]);
  return out;
}

template <typename T>
void check_finite_coord(const NormalizedCoord& x) {
  if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(x.t))
    throw NumericError("forward: non-finite input coordinate");
}

}  // namespace

template <typename T>
std::vector<double> encode(const InrModel<T>& model, const Image& i0, const Image& it) {
  EncoderTrace<T> trace;
  encoder_forward(model, i0, it, trace);
  return std::vector<double>(trace.z.begin(), trace.z.end());
}

template <typename T>
std::vector<std::vector<double>> modulate(const InrModel<T>& model,
                                          const std::vector<double>& z) {
  const auto zt = to_engine<T>(z, model.config.latent_size, "modulate");
  ModulationTrace<T> trace;
  modulation_forward(model, zt.data(), trace);
  std::vector<std::vector<double>> out;
  out.reserve(trace.amps.size());
  for (const auto& a : trace.amps) out.emplace_back(a.begin(), a.end());
  return out;
}

template <typename T>
std::vector<DisplacementResult> forward_points(const InrModel<T>& model,
                                               const std::vector<Vec2>& points_norm, double t,
                                               const std::vector<double>& z,
                                               bool with_jacobians) {
  if (points_norm.empty()) throw DataError("forward_points: empty input");
  for (const auto& p : points_norm)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw NumericError("forward_points: non-finite input coordinate");
  if (!std::isfinite(t)) throw NumericError("forward_points: non-finite time");

  const auto zt = to_engine<T>(z, model.config.latent_size, "forward_points");
  ModulationTrace<T> mods;
  modulation_forward(model, zt.data(), mods);

  const int n = static_cast<int>(points_norm.size());
  std::vector<T> xy(2 * static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    xy[p] = static_cast<T>(points_norm[p].x);
    xy[n + p] = static_cast<T>(points_norm[p].y);
  }

  MlpTrace<T> trace;
  mlp_forward(model, mods, xy.data(), static_cast<T>(t), n, with_jacobians, trace);

  std::vector<DisplacementResult> out(n);
  for (int p = 0; p < n; ++p) {
    out[p].u = {static_cast<double>(trace.u[p]), static_cast<double>(trace.u[n + p])};
    if (with_jacobians) {
      Mat2 j;
      j.j00 = 1.0 + static_cast<double>(trace.tux[p]);
      j.j10 = static_cast<double>(trace.tux[n + p]);
      j.j01 = static_cast<double>(trace.tuy[p]);
      j.j11 = 1.0 + static_cast<double>(trace.tuy[n + p]);
      out[p].jacobian = j;
    }
  }
  return out;
}

template <typename T>
DisplacementResult forward(const InrModel<T>& model, const NormalizedCoord& x,
                           const std::vector<double>& z) {
  check_finite_coord<T>(x);
  return forward_points(model, {{x.x, x.y}}, x.t, z, false)[0];
}

template <typename T>
Mat2 input_jacobian(const InrModel<T>& model, const NormalizedCoord& x,
                    const std::vector<double>& z) {
  check_finite_coord<T>(x);
  return *forward_points(model, {{x.x, x.y}}, x.t, z, true)[0].jacobian;
}

#define TAGTRACK_INSTANTIATE_NETWORK(T)                                                       \
  template void encoder_forward<T>(const InrModel<T>&, const Image&, const Image&,            \
                                   EncoderTrace<T>&);                                         \
  template void modulation_forward<T>(const InrModel<T>&, const T*, ModulationTrace<T>&);     \
  template void mlp_forward<T>(const InrModel<T>&, const ModulationTrace<T>&, const T*, T,    \
                               int, bool, MlpTrace<T>&);                                      \
  template std::vector<double> encode<T>(const InrModel<T>&, const Image&, const Image&);     \
  template std::vector<std::vector<double>> modulate<T>(const InrModel<T>&,                   \
                                                        const std::vector<double>&);          \
  template DisplacementResult forward<T>(const InrModel<T>&, const NormalizedCoord&,          \
                                         const std::vector<double>&);                         \
  template Mat2 input_jacobian<T>(const InrModel<T>&, const NormalizedCoord&,                 \
                                  const std::vector<double>&);                                \
  template std::vector<DisplacementResult> forward_points<T>(                                 \
      const InrModel<T>&, const std::vector<Vec2>&, double, const std::vector<double>&, bool);

TAGTRACK_INSTANTIATE_NETWORK(float)
TAGTRACK_INSTANTIATE_NETWORK(double)

#undef TAGTRACK_INSTANTIATE_NETWORK

}  // namespace tagtrack::diffnet
