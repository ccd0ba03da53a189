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

#pragma once

// Batch arithmetic kernels used by the solvers and detectors.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant compiled in its own translation unit. The top-level functions in
// `wsnloc::kernels` dispatch at runtime on CPU support; setting the
// environment variable WSNLOC_FORCE_SCALAR=1 pins the scalar path.
//
// All arrays are structure-of-arrays spans of equal length.

#include <cstddef>
#include <span>

namespace wsnloc::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
/// Best ISA supported by both the build and the running CPU.
Isa detected_isa();
/// ISA used by the dispatching entry points (honours WSNLOC_FORCE_SCALAR).
Isa active_isa();

/// Entries of a symmetric 2x2 inverse covariance.
struct InverseCov2 {
  double i11 = 1.0;
  double i12 = 0.0;
  double i22 = 1.0;
};

// out[k] = i11*dx^2 + 2*i12*dx*dy + i22*dy^2 with one shared inverse.
void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out);

// Same, with a per-element inverse covariance.
void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out);

// sum_k (sqrt((px-ax_k)^2 + (py-ay_k)^2) - d_k)^2
double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d);

namespace scalar {
void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out);
void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out);
double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d);
}  // namespace scalar

namespace avx2 {
// Only callable when detected_isa() == Isa::Avx2.
void quadratic_form_shared(std::span<const double> dx, std::span<const double> dy,
                           InverseCov2 inv, std::span<double> out);
void quadratic_form_each(std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> i11, std::span<const double> i12,
                         std::span<const double> i22, std::span<double> out);
double range_misfit_sum(double px, double py, std::span<const double> ax,
                        std::span<const double> ay, std::span<const double> d);
}  // namespace avx2

}  // namespace wsnloc::kernels
