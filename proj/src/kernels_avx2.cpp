/*
 * Copyright 2026 The wsnloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wsnloc/kernels.hpp"

#if defined(WSNLOC_BUILD_AVX2)

#include <immintrin.h>

#include <cmath>

namespace wsnloc::kernels::avx2 {

void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d a = _mm256_set1_pd(inv.i11);
  const __m256d b2 = _mm256_set1_pd(2.0 * inv.i12);
  const __m256d c = _mm256_set1_pd(inv.i22);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(dx.data() + k);
    const __m256d y = _mm256_loadu_pd(dy.data() + k);
    // Same association as the scalar path: ((a*x)*x + (2b*x)*y) + (c*y)*y.
    __m256d q = _mm256_mul_pd(_mm256_mul_pd(a, x), x);
    q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(b2, x), y));
    q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(c, y), y));
    _mm256_storeu_pd(out.data() + k, q);
  }
  if (k < n) {
    scalar::quadratic_form_shared(dx.subspan(k), dy.subspan(k), inv, out.subspan(k));
  }
}

void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(dx.data() + k);
    const __m256d y = _mm256_loadu_pd(dy.data() + k);
    const __m256d a = _mm256_loadu_pd(i11.data() + k);
    const __m256d b2 = _mm256_mul_pd(two, _mm256_loadu_pd(i12.data() + k));
    const __m256d c = _mm256_loadu_pd(i22.data() + k);
    __m256d q = _mm256_mul_pd(_mm256_mul_pd(a, x), x);
    q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(b2, x), y));
    q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(c, y), y));
    _mm256_storeu_pd(out.data() + k, q);
  }
  if (k < n) {
    scalar::quadratic_form_each(dx.subspan(k), dy.subspan(k), i11.subspan(k), i12.subspan(k),
                                i22.subspan(k), out.subspan(k));
  }
}

double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d) {
  const std::size_t n = d.size();
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d ex = _mm256_sub_pd(vx, _mm256_loadu_pd(ax.data() + k));
    const __m256d ey = _mm256_sub_pd(vy, _mm256_loadu_pd(ay.data() + k));
    const __m256d len =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    const __m256d r = _mm256_sub_pd(len, _mm256_loadu_pd(d.data() + k));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(r, r));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (k < n) sum += scalar::range_misfit_sum(px, py, ax.subspan(k), ay.subspan(k), d.subspan(k));
  return sum;
}

}  // namespace wsnloc::kernels::avx2

#else

// Non-x86 build: the AVX2 entry points forward to the reference kernels so the
// symbols exist; dispatch never selects them.
namespace wsnloc::kernels::avx2 {

void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out) {
  scalar::quadratic_form_shared(dx, dy, inv, out);
}

void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out) {
  scalar::quadratic_form_each(dx, dy, i11, i12, i22, out);
}

double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d) {
  return scalar::range_misfit_sum(px, py, ax, ay, d);
}

}  // namespace wsnloc::kernels::avx2

#endif
