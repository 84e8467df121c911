// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wdro/simd_kernels.hpp"

#include <cmath>

namespace wdro::simd {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_abs_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

namespace {

bool have_avx2() {
#if defined(WDRO_SIMD_X86) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const bool kUseAvx2 = have_avx2();

}  // namespace

#ifdef WDRO_SIMD_X86
double (*dot)(const double*, const double*, std::size_t) =
    kUseAvx2 ? dot_avx2 : dot_scalar;
void (*axpy)(double, const double*, double*, std::size_t) =
    kUseAvx2 ? axpy_avx2 : axpy_scalar;
void (*scale)(double, double*, std::size_t) =
    kUseAvx2 ? scale_avx2 : scale_scalar;
double (*sum_abs)(const double*, std::size_t) =
    kUseAvx2 ? sum_abs_avx2 : sum_abs_scalar;
#else
double (*dot)(const double*, const double*, std::size_t) = dot_scalar;
void (*axpy)(double, const double*, double*, std::size_t) = axpy_scalar;
void (*scale)(double, double*, std::size_t) = scale_scalar;
double (*sum_abs)(const double*, std::size_t) = sum_abs_scalar;
#endif

const char* active_kernel_set() { return kUseAvx2 ? "avx2" : "scalar"; }

}  // namespace wdro::simd
