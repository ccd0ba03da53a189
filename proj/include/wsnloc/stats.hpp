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

#include <cstdint>
#include <span>
#include <vector>

#include "wsnloc/geometry.hpp"
#include "wsnloc/kernels.hpp"

namespace wsnloc {

/// Symmetric 2x2 covariance [[c11, c12], [c12, c22]] in m^2.
struct CovarianceMatrix2 {
  double c11 = 0.0;
  double c12 = 0.0;
  double c22 = 0.0;

  static CovarianceMatrix2 identity() { return {1.0, 0.0, 1.0}; }
  static CovarianceMatrix2 isotropic(double variance) { return {variance, 0.0, variance}; }
  /// From the sigma_1, sigma_2, rho_12 decomposition.
  static CovarianceMatrix2 from_sigmas(double sigma1, double sigma2, double rho);

  double determinant() const { return c11 * c22 - c12 * c12; }
  double sigma1() const { return std::sqrt(c11); }
  double sigma2() const { return std::sqrt(c22); }
  /// Correlation coefficient; 0 when either variance vanishes.
  double rho() const;
  bool positive_definite() const { return c11 > 0.0 && determinant() > 0.0; }

  friend bool operator==(const CovarianceMatrix2&, const CovarianceMatrix2&) = default;
};

inline constexpr double kCovarianceRidge = 1e-6;        // m^2, added when singular
inline constexpr double kSingularDeterminant = 1e-12;   // m^4

/// Returns `c` if it is safely invertible, else c + ridge * I.
CovarianceMatrix2 regularized(const CovarianceMatrix2& c);

/// Mean-centred sample covariance with 1/(n-1) normalisation.
CovarianceMatrix2 sample_covariance(std::span<const Point2> points);

/// Adjugate inverse of the regularised matrix. Throws SingularCovariance.
CovarianceMatrix2 invert_covariance(const CovarianceMatrix2& c);

/// Inverse and log-determinant of a regularised covariance, ready for batch use.
struct PreparedCovariance {
  kernels::InverseCov2 inverse;
  double log_det = 0.0;
};
PreparedCovariance prepare_covariance(const CovarianceMatrix2& c);

double squared_mahalanobis(Point2 a, Point2 b, const CovarianceMatrix2& c);
double mahalanobis_distance(Point2 a, Point2 b, const CovarianceMatrix2& c);
std::vector<double> mahalanobis_to_centroid(std::span<const Point2> points, Point2 centroid,
                                            const CovarianceMatrix2& c);

/// Covariance of a range-based position fix: (H^T W H)^-1 with H the unit
/// line-of-sight rows from each reference to `position` and W = diag(1/sigma_k^2).
/// A zero sigma everywhere gives the zero matrix.
CovarianceMatrix2 position_fix_covariance(Point2 position, std::span<const Point2> references,
                                          std::span<const double> range_sigmas);

/// Binomial probability mass n!/(x!(n-x)!) w^x (1-w)^(n-x), via log-gamma.
double binomial_pmf(std::uint64_t x, std::uint64_t n, double w);

using GroupId = std::uint32_t;

struct GroupModel {
  GroupId group_id = 0;
  Point2 mean;
  CovarianceMatrix2 covariance = CovarianceMatrix2::identity();
  double prior = 1.0;
};

/// Scales priors so they sum to one.
void normalize_priors(std::span<GroupModel> models);

/// J(z) = ln p - 1/2 ln|C| - 1/2 (z - mean)^T C^-1 (z - mean). With
/// include_prior = false the ln p term is dropped.
double gaussian_discriminant(Point2 z, const GroupModel& model, bool include_prior = true);

/// J for every model at once (batched through the kernels).
std::vector<double> gaussian_discriminants(Point2 z, std::span<const GroupModel> models,
                                           bool include_prior = true);

struct PosteriorVector {
  std::vector<double> probabilities;
  /// Every likelihood underflowed; probabilities were set uniform.
  bool degenerate = false;
};

/// Bayes posterior over the models with Gaussian likelihoods, normalised by
/// the sum of prior-weighted likelihoods. Computed in log space.
PosteriorVector posterior(Point2 z, std::span<const GroupModel> models);

/// Index of the model with the largest discriminant. Ties within 1e-12 go to
/// the lowest group id (then the lowest index).
std::size_t classify_index(Point2 z, std::span<const GroupModel> models);
GroupId classify(Point2 z, std::span<const GroupModel> models);

/// Upper 1-alpha quantile of the chi-square distribution with 2 degrees of
/// freedom: -2 ln(alpha).
double chi_square2_quantile(double alpha);

}  // namespace wsnloc
