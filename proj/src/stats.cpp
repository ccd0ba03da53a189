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

#include "wsnloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wsnloc {

CovarianceMatrix2 CovarianceMatrix2::from_sigmas(double sigma1, double sigma2, double rho) {
  return {sigma1 * sigma1, rho * sigma1 * sigma2, sigma2 * sigma2};
}

double CovarianceMatrix2::rho() const {
  const double denom = std::sqrt(c11 * c22);
  return denom > 0.0 ? c12 / denom : 0.0;
}

CovarianceMatrix2 regularized(const CovarianceMatrix2& c) {
  if (c.c11 > 0.0 && c.determinant() > kSingularDeterminant) return c;
  return {c.c11 + kCovarianceRidge, c.c12, c.c22 + kCovarianceRidge};
}

namespace {

// A zero-variance input regularises to ridge*I, whose determinant is exactly
// the singular threshold; the ridge is accepted whenever it leaves the matrix
// strictly positive definite.
CovarianceMatrix2 invertible_or_throw(const CovarianceMatrix2& c) {
  if (!std::isfinite(c.c11) || !std::isfinite(c.c12) || !std::isfinite(c.c22)) {
    throw Error(ErrorCode::SingularCovariance, "non-finite covariance entry");
  }
  const CovarianceMatrix2 r = regularized(c);
  if (!r.positive_definite()) {
    throw Error(ErrorCode::SingularCovariance, "covariance is not positive definite after ridge");
  }
  return r;
}

}  // namespace

CovarianceMatrix2 sample_covariance(std::span<const Point2> points) {
  if (points.size() < 2) throw Error(ErrorCode::TooFewPoints, "sample covariance needs n >= 2");
  const double n = static_cast<double>(points.size());
  Point2 mean;
  for (const Point2& p : points) mean = mean + p;
  mean = (1.0 / n) * mean;
  CovarianceMatrix2 c;
  for (const Point2& p : points) {
    const Point2 d = p - mean;
    c.c11 += d.x * d.x;
    c.c12 += d.x * d.y;
    c.c22 += d.y * d.y;
  }
  const double scale = 1.0 / (n - 1.0);
  return {c.c11 * scale, c.c12 * scale, c.c22 * scale};
}

CovarianceMatrix2 invert_covariance(const CovarianceMatrix2& c) {
  const CovarianceMatrix2 r = invertible_or_throw(c);
  const double det = r.determinant();
  return {r.c22 / det, -r.c12 / det, r.c11 / det};
}

PreparedCovariance prepare_covariance(const CovarianceMatrix2& c) {
  const CovarianceMatrix2 r = invertible_or_throw(c);
  const double det = r.determinant();
  PreparedCovariance prepared;
  prepared.inverse = {r.c22 / det, -r.c12 / det, r.c11 / det};
  prepared.log_det = std::log(det);
  return prepared;
}

double squared_mahalanobis(Point2 a, Point2 b, const CovarianceMatrix2& c) {
  const CovarianceMatrix2 inv = invert_covariance(c);
  const Point2 d = a - b;
  return std::max(0.0, inv.c11 * d.x * d.x + 2.0 * inv.c12 * d.x * d.y + inv.c22 * d.y * d.y);
}

double mahalanobis_distance(Point2 a, Point2 b, const CovarianceMatrix2& c) {
  return std::sqrt(squared_mahalanobis(a, b, c));
}

std::vector<double> mahalanobis_to_centroid(std::span<const Point2> points, Point2 centroid,
                                            const CovarianceMatrix2& c) {
  const PreparedCovariance prepared = prepare_covariance(c);
  std::vector<double> dx(points.size()), dy(points.size()), out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    dx[k] = points[k].x - centroid.x;
    dy[k] = points[k].y - centroid.y;
  }
  kernels::quadratic_form_shared(dx, dy, prepared.inverse, out);
  for (double& v : out) v = std::sqrt(std::max(0.0, v));
  return out;
}

CovarianceMatrix2 position_fix_covariance(Point2 position, std::span<const Point2> references,
                                          std::span<const double> range_sigmas) {
  double f11 = 0.0, f12 = 0.0, f22 = 0.0;
  bool any_noise = false;
  for (std::size_t k = 0; k < references.size(); ++k) {
    const double sigma = range_sigmas[k];
    if (!(sigma > 0.0)) continue;
    any_noise = true;
    const Point2 d = position - references[k];
    const double len = d.norm();
    if (len < kDuplicateTolerance) continue;
    const double w = 1.0 / (sigma * sigma);
    const double ux = d.x / len;
    const double uy = d.y / len;
    f11 += w * ux * ux;
    f12 += w * ux * uy;
    f22 += w * uy * uy;
  }
  if (!any_noise) return {};
  const double det = f11 * f22 - f12 * f12;
  if (!(det > 0.0)) {
    throw Error(ErrorCode::SingularCovariance, "reference geometry gives a singular fix");
  }
  return {f22 / det, -f12 / det, f11 / det};
}

double binomial_pmf(std::uint64_t x, std::uint64_t n, double w) {
  if (x > n) throw Error(ErrorCode::OutOfDomain, "x > n");
  if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::OutOfDomain, "w outside [0, 1]");
  const double xd = static_cast<double>(x);
  const double nd = static_cast<double>(n);
  // Boundary probabilities: 0^0 = 1.
  if (w == 0.0) return x == 0 ? 1.0 : 0.0;
  if (w == 1.0) return x == n ? 1.0 : 0.0;
  const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(xd + 1.0) - std::lgamma(nd - xd + 1.0);
  return std::exp(log_choose + xd * std::log(w) + (nd - xd) * std::log1p(-w));
}

void normalize_priors(std::span<GroupModel> models) {
  double total = 0.0;
  for (const GroupModel& m : models) total += m.prior;
  if (!(total > 0.0)) throw Error(ErrorCode::OutOfDomain, "priors must be positive");
  for (GroupModel& m : models) m.prior /= total;
}

double gaussian_discriminant(Point2 z, const GroupModel& model, bool include_prior) {
  const PreparedCovariance prepared = prepare_covariance(model.covariance);
  const Point2 d = z - model.mean;
  const auto& inv = prepared.inverse;
  const double q = inv.i11 * d.x * d.x + 2.0 * inv.i12 * d.x * d.y + inv.i22 * d.y * d.y;
  double j = -0.5 * prepared.log_det - 0.5 * q;
  if (include_prior) j += std::log(model.prior);
  return j;
}

std::vector<double> gaussian_discriminants(Point2 z, std::span<const GroupModel> models,
                                           bool include_prior) {
  const std::size_t n = models.size();
  std::vector<double> dx(n), dy(n), i11(n), i12(n), i22(n), bias(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PreparedCovariance prepared = prepare_covariance(models[k].covariance);
    dx[k] = z.x - models[k].mean.x;
    dy[k] = z.y - models[k].mean.y;
    i11[k] = prepared.inverse.i11;
    i12[k] = prepared.inverse.i12;
    i22[k] = prepared.inverse.i22;
    bias[k] = -0.5 * prepared.log_det + (include_prior ? std::log(models[k].prior) : 0.0);
  }
  kernels::quadratic_form_each(dx, dy, i11, i12, i22, q);
  for (std::size_t k = 0; k < n; ++k) q[k] = bias[k] - 0.5 * q[k];
  return q;
}

PosteriorVector posterior(Point2 z, std::span<const GroupModel> models) {
  if (models.empty()) throw Error(ErrorCode::OutOfDomain, "posterior needs at least one model");
  // Full log density: J minus the (S/2) ln 2pi constant, which cancels.
  const std::vector<double> log_joint = gaussian_discriminants(z, models, true);
  const double peak = *std::max_element(log_joint.begin(), log_joint.end());

  PosteriorVector out;
  out.probabilities.assign(models.size(), 0.0);
  if (!std::isfinite(peak)) {
    out.degenerate = true;
    std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0 / static_cast<double>(models.size()));
    return out;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    out.probabilities[k] = std::exp(log_joint[k] - peak);
    total += out.probabilities[k];
  }
  for (double& p : out.probabilities) p /= total;
  return out;
}

std::size_t classify_index(Point2 z, std::span<const GroupModel> models) {
  if (models.empty()) throw Error(ErrorCode::OutOfDomain, "classify needs at least one model");
  const std::vector<double> j = gaussian_discriminants(z, models, true);
  const double peak = *std::max_element(j.begin(), j.end());
  std::size_t best = models.size();
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (!(j[k] >= peak - 1e-12)) continue;
    if (best == models.size() || models[k].group_id < models[best].group_id) best = k;
  }
  return best == models.size() ? 0 : best;
}

GroupId classify(Point2 z, std::span<const GroupModel> models) {
  return models[classify_index(z, models)].group_id;
}

double chi_square2_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::OutOfDomain, "alpha must be in (0, 1)");
  return -2.0 * std::log(alpha);
}

}  // namespace wsnloc
