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

// Scalar reference lane. Plain mul/add only (no fused ops) so results are
// reproducible with any compiler at -O2 without fast-math. Each gemm output
// accumulates in ascending-k order; the AVX2 lane keeps the same per-element
// order where the bitwise contract requires it (gemm_nn, elementwise ops).

#include <cmath>
#include <cstring>

#include "tagtrack/kernels/kernels.hpp"
#include "tagtrack/kernels/sincos_core.hpp"

namespace tagtrack::kernels::scalar {
namespace {

template <typename T>
void gemm_nn_impl(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<std::size_t>(i) * k;
    T* crow = c + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      const T aik = arow[kk];
      const T* brow = b + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

template <typename T>
void gemm_nt_impl(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<std::size_t>(i) * k;
    T* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + static_cast<std::size_t>(j) * k;
      T acc = accumulate ? crow[j] : T(0);
      for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
      crow[j] = acc;
    }
  }
}

template <typename T>
void gemm_tn_impl(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * static_cast<std::size_t>(m) * n);
  for (int kk = 0; kk < k; ++kk) {
    const T* arow = a + static_cast<std::size_t>(kk) * m;
    const T* brow = b + static_cast<std::size_t>(kk) * n;
    for (int i = 0; i < m; ++i) {
      const T aki = arow[i];
      T* crow = c + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
}

template <typename T>
void add_row_bias_impl(T* c, const T* bias, int m, int n) {
  for (int i = 0; i < m; ++i) {
    const T bi = bias[i];
    T* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] += bi;
  }
}

template <typename T>
void scale_rows_impl(T* c, const T* s, int m, int n) {
  for (int i = 0; i < m; ++i) {
    const T si = s[i];
    T* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] *= si;
  }
}

template <typename T>
void relu_impl(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_backward_impl(const T* y, const T* dy, T* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = y[i] > T(0) ? dy[i] : T(0);
}

template <typename T>
void adam_update_impl(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2, T eps,
                 T bc1, T bc2) {
  const T omb1 = T(1) - beta1;
  const T omb2 = T(1) - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const T gi = g[i];
    m[i] = (beta1 * m[i]) + (omb1 * gi);
    v[i] = (beta2 * v[i]) + (omb2 * (gi * gi));
    const T mhat = m[i] / bc1;
    const T vhat = v[i] / bc2;
    p[i] = p[i] - (lr * mhat) / (std::sqrt(vhat) + eps);
  }
}

template <typename T>
T reduce_sum_impl(const T* x, std::size_t n) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <typename T>
T reduce_sumsq_impl(const T* x, std::size_t n) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

template <typename T>
void axpy_impl(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

void sincos_scaled(const float* x, float omega, float* s, float* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) detail::sincosf_core(omega * x[i], s[i], c[i]);
}

void sincos_scaled(const double* x, double omega, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = omega * x[i];
    s[i] = std::sin(t);
    c[i] = std::cos(t);
  }
}

#define TAGTRACK_DEFINE_SCALAR_LANE(T)                                                        \
  void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {          \
    gemm_nn_impl(a, b, c, m, k, n, accumulate);                                               \
  }                                                                                           \
  void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {          \
    gemm_nt_impl(a, b, c, m, k, n, accumulate);                                               \
  }                                                                                           \
  void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {          \
    gemm_tn_impl(a, b, c, m, k, n, accumulate);                                               \
  }                                                                                           \
  void add_row_bias(T* c, const T* bias, int m, int n) { add_row_bias_impl(c, bias, m, n); }  \
  void scale_rows(T* c, const T* s, int m, int n) { scale_rows_impl(c, s, m, n); }            \
  void relu(const T* x, T* y, std::size_t n) { relu_impl(x, y, n); }                          \
  void relu_backward(const T* y, const T* dy, T* dx, std::size_t n) {                         \
    relu_backward_impl(y, dy, dx, n);                                                         \
  }                                                                                           \
  void adam_update(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,      \
                   T eps, T bc1, T bc2) {                                                     \
    adam_update_impl(p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);                         \
  }                                                                                           \
  T reduce_sum(const T* x, std::size_t n) { return reduce_sum_impl(x, n); }                   \
  T reduce_sumsq(const T* x, std::size_t n) { return reduce_sumsq_impl(x, n); }               \
  void axpy(T alpha, const T* x, T* y, std::size_t n) { axpy_impl(alpha, x, y, n); }

TAGTRACK_DEFINE_SCALAR_LANE(float)
TAGTRACK_DEFINE_SCALAR_LANE(double)

#undef TAGTRACK_DEFINE_SCALAR_LANE

}  // namespace tagtrack::kernels::scalar
