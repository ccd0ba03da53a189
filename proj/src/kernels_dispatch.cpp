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

#include <cstdlib>
#include <cstring>

#include "wsnloc/kernels.hpp"

namespace wsnloc::kernels {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Scalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() {
#if defined(WSNLOC_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const Isa isa = __builtin_cpu_supports("avx2") ? Isa::Avx2 : Isa::Scalar;
  return isa;
#else
  return Isa::Scalar;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* force = std::getenv("WSNLOC_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0 && *force != '\0') return Isa::Scalar;
    return detected_isa();
  }();
  return isa;
}

void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::quadratic_form_shared(dx, dy, inv, out);
  } else {
    scalar::quadratic_form_shared(dx, dy, inv, out);
  }
}

void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::quadratic_form_each(dx, dy, i11, i12, i22, out);
  } else {
    scalar::quadratic_form_each(dx, dy, i11, i12, i22, out);
  }
}

double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d) {
  if (active_isa() == Isa::Avx2) return avx2::range_misfit_sum(px, py, ax, ay, d);
  return scalar::range_misfit_sum(px, py, ax, ay, d);
}

}  // namespace wsnloc::kernels
