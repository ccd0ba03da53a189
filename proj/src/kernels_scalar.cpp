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

#include <cmath>

#include "wsnloc/kernels.hpp"

namespace wsnloc::kernels::scalar {

void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double x = dx[k];
    const double y = dy[k];
    out[k] = inv.i11 * x * x + 2.0 * inv.i12 * x * y + inv.i22 * y * y;
  }
}

void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double x = dx[k];
    const double y = dy[k];
    out[k] = i11[k] * x * x + 2.0 * i12[k] * x * y + i22[k] * y * y;
  }
}

double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d) {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double ex = px - ax[k];
    const double ey = py - ay[k];
    const double r = std::sqrt(ex * ex + ey * ey) - d[k];
    sum += r * r;
  }
  return sum;
}

}  // namespace wsnloc::kernels::scalar
