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

#include "wsnloc/geometry.hpp"

#include <Eigen/Dense>

#include <string>

#include "wsnloc/kernels.hpp"

namespace wsnloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::CollinearAnchors: return "CollinearAnchors";
    case ErrorCode::DuplicateAnchors: return "DuplicateAnchors";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NoUsableGroups: return "NoUsableGroups";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

void TrilaterationProblem::validate() const {
  if (anchors.size() != distances.size()) {
    throw Error(ErrorCode::InvalidProblem, "anchor and distance counts differ");
  }
  if (anchors.size() < 3) {
    throw Error(ErrorCode::InvalidProblem, "need at least 3 anchors, got " + std::to_string(anchors.size()));
  }
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    if (!anchors[k].finite()) throw Error(ErrorCode::InvalidProblem, "non-finite anchor position");
    if (!std::isfinite(distances[k]) || distances[k] < 0.0) {
      throw Error(ErrorCode::InvalidProblem, "distance must be finite and >= 0");
    }
  }
}

namespace {

void check_duplicates(std::span<const Point2> anchors) {
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    for (std::size_t b = a + 1; b < anchors.size(); ++b) {
      if (distance(anchors[a], anchors[b]) < kDuplicateTolerance) {
        throw Error(ErrorCode::DuplicateAnchors,
                    "anchors " + std::to_string(a) + " and " + std::to_string(b) + " coincide");
      }
    }
  }
}

// Radicand of the out-of-plane coordinate, evaluated in anchor 1's frame.
double radicand_at(Point2 position, const TrilaterationProblem& problem) {
  const Point2 rel = position - problem.anchors[0];
  const double l1 = problem.distances[0];
  return l1 * l1 - dot(rel, rel);
}

}  // namespace

Meters range_residual(Point2 position, const TrilaterationProblem& problem) {
  const std::size_t n = problem.size();
  if (n == 0) return 0.0;
  std::vector<double> ax(n), ay(n);
  for (std::size_t k = 0; k < n; ++k) {
    ax[k] = problem.anchors[k].x;
    ay[k] = problem.anchors[k].y;
  }
  const double sum = kernels::range_misfit_sum(position.x, position.y, ax, ay, problem.distances);
  return std::sqrt(sum / static_cast<double>(n));
}

LocalizationResult solve_trilateration_exact(const TrilaterationProblem& problem) {
  problem.validate();
  if (problem.size() != 3) {
    throw Error(ErrorCode::InvalidProblem, "closed-form solve takes exactly 3 anchors");
  }
  const Point2 p1 = problem.anchors[0];
  const Point2 p2 = problem.anchors[1];
  const Point2 p3 = problem.anchors[2];
  check_duplicates(problem.anchors);
  if (triangle_area(p1, p2, p3) < kCollinearAreaTolerance) {
    throw Error(ErrorCode::CollinearAnchors, "anchors are collinear");
  }

  // Canonical frame: p1 at the origin, p2 at (D, 0), p3 at (i, j).
  const double d = distance(p1, p2);
  const Point2 ex = (1.0 / d) * (p2 - p1);
  const Point2 ey{-ex.y, ex.x};
  const double i = dot(ex, p3 - p1);
  const double j = dot(ey, p3 - p1);

  const double l1 = problem.distances[0];
  const double l2 = problem.distances[1];
  const double l3 = problem.distances[2];
  const double a1 = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  const double a2 = (l1 * l1 - l3 * l3 + i * i + j * j - 2.0 * i * a1) / (2.0 * j);

  LocalizationResult result;
  result.position = p1 + a1 * ex + a2 * ey;
  result.radicand = l1 * l1 - a1 * a1 - a2 * a2;
  result.residual = range_residual(result.position, problem);
  return result;
}

LocalizationResult solve_multilateration_lsq(const TrilaterationProblem& problem) {
  problem.validate();
  check_duplicates(problem.anchors);
  const std::size_t n = problem.size();
  const Point2 origin = problem.anchors[0];
  const double l1 = problem.distances[0];

  // For k >= 2: 2 (a_k - a_1) . p' = L1^2 - Lk^2 + |a_k - a_1|^2, with p' = p - a_1.
  Eigen::MatrixXd a(n - 1, 2);
  Eigen::VectorXd b(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    const Point2 rel = problem.anchors[k] - origin;
    const double lk = problem.distances[k];
    a(k - 1, 0) = 2.0 * rel.x;
    a(k - 1, 1) = 2.0 * rel.y;
    b(k - 1) = l1 * l1 - lk * lk + dot(rel, rel);
  }
  // Rank test on the anchor geometry itself: the largest triangle spanned with
  // the first anchor must clear the collinearity tolerance.
  double max_area = 0.0;
  for (std::size_t u = 1; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      max_area = std::max(max_area, triangle_area(origin, problem.anchors[u], problem.anchors[v]));
    }
  }
  if (max_area < kCollinearAreaTolerance) {
    throw Error(ErrorCode::RankDeficient, "anchors are collinear; linear system has rank < 2");
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) throw Error(ErrorCode::RankDeficient, "linear system has rank < 2");
  const Eigen::Vector2d solution = qr.solve(b);

  // The linear system weights range errors by roughly 2L; polish on the
  // range misfit itself.
  return refine_position(problem, origin + Point2{solution(0), solution(1)});
}

LocalizationResult refine_position(const TrilaterationProblem& problem, Point2 start,
                                   int max_iterations) {
  problem.validate();
  const std::size_t n = problem.size();
  Point2 current = start;
  double best = range_residual(current, problem);

  for (int iter = 0; iter < max_iterations; ++iter) {
    // Normal equations of the linearised range model.
    double h11 = 0.0, h12 = 0.0, h22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const Point2 diff = current - problem.anchors[k];
      const double len = diff.norm();
      if (len < kDuplicateTolerance) continue;
      const double ux = diff.x / len;
      const double uy = diff.y / len;
      const double r = len - problem.distances[k];
      h11 += ux * ux;
      h12 += ux * uy;
      h22 += uy * uy;
      g1 += ux * r;
      g2 += uy * r;
    }
    const double det = h11 * h22 - h12 * h12;
    if (!(det > 1e-12)) break;
    const Point2 step{(h22 * g1 - h12 * g2) / det, (h11 * g2 - h12 * g1) / det};

    // Step halving keeps the misfit non-increasing.
    double factor = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      const Point2 candidate = current - factor * step;
      const double value = range_residual(candidate, problem);
      if (value <= best) {
        current = candidate;
        improved = value < best;
        best = value;
        break;
      }
      factor *= 0.5;
    }
    if (!improved || step.norm() * factor < 1e-12) break;
  }

  LocalizationResult result;
  result.position = current;
  result.residual = best;
  result.radicand = radicand_at(current, problem);
  return result;
}

namespace {

Point2 reflect_across(Point2 p, Point2 a, Point2 b) {
  const Point2 dir = b - a;
  const double t = dot(p - a, dir) / dot(dir, dir);
  const Point2 foot = a + t * dir;
  return foot + (foot - p);
}

}  // namespace

LocalizationResult solve_position(const TrilaterationProblem& problem) {
  const Point2 start = problem.size() == 3 ? solve_trilateration_exact(problem).position
                                           : solve_multilateration_lsq(problem).position;
  LocalizationResult best = refine_position(problem, start);
  const std::size_t n = problem.size();
  if (n > kMirrorRestartLimit) return best;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (distance(problem.anchors[a], problem.anchors[b]) < kDuplicateTolerance) continue;
      const Point2 mirrored = reflect_across(best.position, problem.anchors[a], problem.anchors[b]);
      const LocalizationResult candidate = refine_position(problem, mirrored);
      if (candidate.residual < best.residual) best = candidate;
    }
  }
  return best;
}

}  // namespace wsnloc
