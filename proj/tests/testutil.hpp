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

#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "wsnloc/error.hpp"
#include "wsnloc/geometry.hpp"

// Asserts that `expr` throws wsnloc::Error carrying `expected`.
#define CHECK_THROWS_CODE(expr, expected)                 \
  do {                                                    \
    bool thrown_ = false;                                 \
    try {                                                 \
      (void)(expr);                                       \
    } catch (const wsnloc::Error& e_) {                   \
      thrown_ = true;                                     \
      CHECK(e_.code() == (expected));                     \
    }                                                     \
    CHECK_MESSAGE(thrown_, "expected wsnloc::Error");     \
  } while (false)

namespace testutil {

inline std::vector<oracle::Xy> to_xy(const std::vector<wsnloc::Point2>& pts) {
  std::vector<oracle::Xy> out;
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

/// Random anchors in a box whose triangle (first three) is comfortably
/// non-degenerate.
inline std::vector<wsnloc::Point2> random_anchors(std::mt19937_64& rng, std::size_t n, double box = 100.0,
                                                  double min_area = 50.0) {
  std::uniform_real_distribution<double> u(0.0, box);
  for (;;) {
    std::vector<wsnloc::Point2> pts;
    for (std::size_t k = 0; k < n; ++k) pts.push_back({u(rng), u(rng)});
    bool spaced = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) spaced = spaced && wsnloc::distance(pts[a], pts[b]) > 1.0;
    if (spaced && wsnloc::triangle_area(pts[0], pts[1], pts[2]) > min_area) return pts;
  }
}

inline wsnloc::TrilaterationProblem exact_problem(const std::vector<wsnloc::Point2>& anchors, wsnloc::Point2 truth) {
  wsnloc::TrilaterationProblem p;
  p.anchors = anchors;
  for (const auto& a : anchors) p.distances.push_back(wsnloc::distance(a, truth));
  return p;
}

}  // namespace testutil
