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

#include <atomic>
#include <cstdlib>
#include <string>

#include "tagtrack/kernels/kernels.hpp"
#include "tagtrack/util/errors.hpp"

namespace tagtrack::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa resolve_initial_isa() {
  if (const char* env = std::getenv("TAGTRACK_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2") {
      if (!cpu_has_avx2()) throw UsageError("TAGTRACK_SIMD=avx2 but the CPU lacks AVX2/FMA");
      return Isa::avx2;
    }
    if (!v.empty() && v != "auto")
      throw UsageError("TAGTRACK_SIMD must be one of scalar|avx2|auto, got '" + v + "'");
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{resolve_initial_isa()};
  return slot;
}

}  // namespace

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2())
    throw UsageError("set_isa(avx2): CPU lacks AVX2/FMA");
  isa_slot().store(isa, std::memory_order_relaxed);
}

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

template <typename T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (active_isa() == Isa::avx2)
    avx2::gemm_nn(a, b, c, m, k, n, accumulate);
  else
    scalar::gemm_nn(a, b, c, m, k, n, accumulate);
}

template <typename T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (active_isa() == Isa::avx2)
    avx2::gemm_nt(a, b, c, m, k, n, accumulate);
  else
    scalar::gemm_nt(a, b, c, m, k, n, accumulate);
}

template <typename T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (active_isa() == Isa::avx2)
    avx2::gemm_tn(a, b, c, m, k, n, accumulate);
  else
    scalar::gemm_tn(a, b, c, m, k, n, accumulate);
}

template <typename T>
void add_row_bias(T* c, const T* bias, int m, int n) {
  if (active_isa() == Isa::avx2)
    avx2::add_row_bias(c, bias, m, n);
  else
    scalar::add_row_bias(c, bias, m, n);
}

template <typename T>
void scale_rows(T* c, const T* s, int m, int n) {
  if (active_isa() == Isa::avx2)
    avx2::scale_rows(c, s, m, n);
  else
    scalar::scale_rows(c, s, m, n);
}

template <typename T>
void sincos_scaled(const T* x, T omega, T* s, T* c, std::size_t n) {
  if (active_isa() == Isa::avx2)
    avx2::sincos_scaled(x, omega, s, c, n);
  else
    scalar::sincos_scaled(x, omega, s, c, n);
}

template <typename T>
void relu(const T* x, T* y, std::size_t n) {
  if (active_isa() == Isa::avx2)
    avx2::relu(x, y, n);
  else
    scalar::relu(x, y, n);
}

template <typename T>
void relu_backward(const T* y, const T* dy, T* dx, std::size_t n) {
  if (active_isa() == Isa::avx2)
    avx2::relu_backward(y, dy, dx, n);
  else
    scalar::relu_backward(y, dy, dx, n);
}

template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2, T eps,
                 T bc1, T bc2) {
  if (active_isa() == Isa::avx2)
    avx2::adam_update(p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
  else
    scalar::adam_update(p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

template <typename T>
T reduce_sum(const T* x, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::reduce_sum(x, n) : scalar::reduce_sum(x, n);
}

template <typename T>
T reduce_sumsq(const T* x, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::reduce_sumsq(x, n) : scalar::reduce_sumsq(x, n);
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  if (active_isa() == Isa::avx2)
    avx2::axpy(alpha, x, y, n);
  else
    scalar::axpy(alpha, x, y, n);
}

#define TAGTRACK_INSTANTIATE_DISPATCH(T)                                                      \
  template void gemm_nn<T>(const T*, const T*, T*, int, int, int, bool);                      \
  template void gemm_nt<T>(const T*, const T*, T*, int, int, int, bool);                      \
  template void gemm_tn<T>(const T*, const T*, T*, int, int, int, bool);                      \
  template void add_row_bias<T>(T*, const T*, int, int);                                      \
  template void scale_rows<T>(T*, const T*, int, int);                                        \
  template void sincos_scaled<T>(const T*, T, T*, T*, std::size_t);                           \
  template void relu<T>(const T*, T*, std::size_t);                                           \
  template void relu_backward<T>(const T*, const T*, T*, std::size_t);                        \
  template void adam_update<T>(T*, const T*, T*, T*, std::size_t, T, T, T, T, T, T);          \
  template T reduce_sum<T>(const T*, std::size_t);                                            \
  template T reduce_sumsq<T>(const T*, std::size_t);                                          \
  template void axpy<T>(T, const T*, T*, std::size_t);

TAGTRACK_INSTANTIATE_DISPATCH(float)
TAGTRACK_INSTANTIATE_DISPATCH(double)

#undef TAGTRACK_INSTANTIATE_DISPATCH

}  // namespace tagtrack::kernels
