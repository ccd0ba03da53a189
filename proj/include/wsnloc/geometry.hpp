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

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "wsnloc/error.hpp"

namespace wsnloc {

using Meters = double;

struct Point2 {
  Meters x = 0.0;
  Meters y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline Meters distance(Point2 a, Point2 b) { return (a - b).norm(); }
inline double triangle_area(Point2 a, Point2 b, Point2 c) { return 0.5 * std::abs(cross(b - a, c - a)); }

// Degeneracy thresholds for the solvers.
inline constexpr double kCollinearAreaTolerance = 1e-6;  // m^2
inline constexpr Meters kDuplicateTolerance = 1e-6;      // m

/// Anchor positions paired with measured ranges. At least three anchors.
struct TrilaterationProblem {
  std::vector<Point2> anchors;
  std::vector<Meters> distances;

  std::size_t size() const { return anchors.size(); }
  /// Throws InvalidProblem when sizes mismatch, n < 3 or values are not finite.
  void validate() const;
};

struct LocalizationResult {
  Point2 position;
  Meters residual = 0.0;   // RMS range misfit at `position`
  double radicand = 0.0;   // L1^2 - A1^2 - A2^2 in the first anchor's frame, signed
};

/// Closed-form three-anchor solve in the canonical frame where anchor 1 sits
/// at the origin and anchor 2 on the positive x axis. Anchor order is used
/// as given.
LocalizationResult solve_trilateration_exact(const TrilaterationProblem& problem);

/// Linearised least squares over n >= 3 anchors (first range equation
/// subtracted from the rest), solved with column-pivoting QR, then polished
/// with refine_position.
LocalizationResult solve_multilateration_lsq(const TrilaterationProblem& problem);

/// Gauss-Newton on the nonlinear range misfit, started from `start`.
/// Never returns a point with a larger misfit than `start`.
LocalizationResult refine_position(const TrilaterationProblem& problem, Point2 start,
                                   int max_iterations = 25);

/// Full position solve: algebraic start (closed form for three anchors, LSQ
/// otherwise) polished by Gauss-Newton. For up to kMirrorRestartLimit anchors
/// the start is also reflected across every anchor-pair line and the lowest
/// misfit wins, which escapes the flipped-triangle local minimum.
inline constexpr std::size_t kMirrorRestartLimit = 8;
LocalizationResult solve_position(const TrilaterationProblem& problem);

/// sqrt(mean_k (|position - anchor_k| - distance_k)^2).
Meters range_residual(Point2 position, const TrilaterationProblem& problem);

}  // namespace wsnloc
