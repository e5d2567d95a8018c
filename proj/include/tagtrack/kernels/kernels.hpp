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
#include <string>

namespace tagtrack::kernels {

// Arithmetic kernels come in two lanes: a scalar reference and an AVX2/FMA
// variant, selected once at startup (cpuid, overridable via TAGTRACK_SIMD=
// scalar|avx2|auto or set_isa). Contract between lanes:
//   - elementwise kernels (sincos_scaled, relu, adam_update, row bias/scale)
//     perform the same IEEE operation sequence per element in both lanes and
//     are bitwise-equivalent;
//   - matrix kernels and reductions differ in summation order between lanes
//     and are equivalence-tested to tolerance.
// Within one lane, gemm_nn accumulates each output strictly in ascending-k
// order, so evaluating a batch of columns equals evaluating each column
// alone, bitwise.

enum class Isa { scalar, avx2 };

Isa active_isa();
void set_isa(Isa isa);
bool cpu_has_avx2();
std::string isa_name(Isa isa);

// C[m x n] = A[m x k] * B[k x n]  (+= when accumulate). Row-major throughout.
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);

// C[m x n] = A[m x k] * B[n x k]^T  (+= when accumulate).
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);

// C[m x n] = A[k x m]^T * B[k x n]  (+= when accumulate).
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);

// c[i, :] += bias[i]
template <typename T>
void add_row_bias(T* c, const T* bias, int m, int n);

// c[i, :] *= s[i]
template <typename T>
void scale_rows(T* c, const T* s, int m, int n);

// s = sin(omega*x), c = cos(omega*x). The float lane uses a Cody-Waite
// reduced polynomial accurate to a few ulp for |omega*x| <~ 1e4; the double
// lane calls libm in both ISA variants.
template <typename T>
void sincos_scaled(const T* x, T omega, T* s, T* c, std::size_t n);

template <typename T>
void relu(const T* x, T* y, std::size_t n);

// dx = dy where y > 0, else 0.
template <typename T>
void relu_backward(const T* y, const T* dy, T* dx, std::size_t n);

// In-place Adam step with precomputed bias corrections bc1 = 1-beta1^t,
// bc2 = 1-beta2^t.
template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2, T eps,
                 T bc1, T bc2);

template <typename T>
T reduce_sum(const T* x, std::size_t n);

template <typename T>
T reduce_sumsq(const T* x, std::size_t n);

// y += alpha * x
template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n);

#define TAGTRACK_EXTERN_DISPATCH(T)                                                           \
  extern template void gemm_nn<T>(const T*, const T*, T*, int, int, int, bool);               \
  extern template void gemm_nt<T>(const T*, const T*, T*, int, int, int, bool);               \
  extern template void gemm_tn<T>(const T*, const T*, T*, int, int, int, bool);               \
  extern template void add_row_bias<T>(T*, const T*, int, int);                               \
  extern template void scale_rows<T>(T*, const T*, int, int);                                 \
  extern template void sincos_scaled<T>(const T*, T, T*, T*, std::size_t);                    \
  extern template void relu<T>(const T*, T*, std::size_t);                                    \
  extern template void relu_backward<T>(const T*, const T*, T*, std::size_t);                 \
  extern template void adam_update<T>(T*, const T*, T*, T*, std::size_t, T, T, T, T, T, T);   \
  extern template T reduce_sum<T>(const T*, std::size_t);                                     \
  extern template T reduce_sumsq<T>(const T*, std::size_t);                                   \
  extern template void axpy<T>(T, const T*, T*, std::size_t);

TAGTRACK_EXTERN_DISPATCH(float)
TAGTRACK_EXTERN_DISPATCH(double)

#undef TAGTRACK_EXTERN_DISPATCH

#define TAGTRACK_DECLARE_LANE(T)                                                              \
  void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);           \
  void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);           \
  void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);           \
  void add_row_bias(T* c, const T* bias, int m, int n);                                       \
  void scale_rows(T* c, const T* s, int m, int n);                                            \
  void sincos_scaled(const T* x, T omega, T* s, T* c, std::size_t n);                         \
  void relu(const T* x, T* y, std::size_t n);                                                 \
  void relu_backward(const T* y, const T* dy, T* dx, std::size_t n);                          \
  void adam_update(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,       \
                   T eps, T bc1, T bc2);                                                      \
  T reduce_sum(const T* x, std::size_t n);                                                    \
  T reduce_sumsq(const T* x, std::size_t n);                                                  \
  void axpy(T alpha, const T* x, T* y, std::size_t n);

// Scalar reference lane, exposed for the lane-equivalence tests.
namespace scalar {
TAGTRACK_DECLARE_LANE(float)
TAGTRACK_DECLARE_LANE(double)
}  // namespace scalar

// AVX2 lane. Calling these on a CPU without AVX2+FMA is undefined; go
// through the dispatching wrappers above instead.
namespace avx2 {
TAGTRACK_DECLARE_LANE(float)
TAGTRACK_DECLARE_LANE(double)
}  // namespace avx2

#undef TAGTRACK_DECLARE_LANE

}  // namespace tagtrack::kernels
