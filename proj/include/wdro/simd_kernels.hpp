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

#pragma once

#include <cstddef>

// Dense vector kernels used by the LP engine and cut-pool evaluation.
// Scalar versions are the reference semantics; on x86 hosts with AVX2 the
// dispatched entry points switch to vectorized variants at startup.

namespace wdro::simd {

// Reference kernels.
double dot_scalar(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);
double sum_abs_scalar(const double* x, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
#define WDRO_SIMD_X86 1
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
double sum_abs_avx2(const double* x, std::size_t n);
#endif

// Dispatched entry points, bound once before main().
extern double (*dot)(const double*, const double*, std::size_t);
extern void (*axpy)(double, const double*, double*, std::size_t);
extern void (*scale)(double, double*, std::size_t);
extern double (*sum_abs)(const double*, std::size_t);

// Name of the active kernel set: "scalar" or "avx2".
const char* active_kernel_set();

}  // namespace wdro::simd
