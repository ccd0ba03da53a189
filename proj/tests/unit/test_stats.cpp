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
#include <numeric>
#include <random>

#include "testutil.hpp"
#include "wsnloc/stats.hpp"

using namespace wsnloc;

TEST_CASE("sample covariance") {
  const std::vector<Point2> same(10, Point2{3, -1});
  CHECK(sample_covariance(same) == CovarianceMatrix2{0, 0, 0});

  const std::vector<Point2> two{{0, 0}, {2, 2}};
  const CovarianceMatrix2 c = sample_covariance(two);
  CHECK(c.c11 == doctest::Approx(2.0));
  CHECK(c.c12 == doctest::Approx(2.0));
  CHECK(c.c22 == doctest::Approx(2.0));

  CHECK_THROWS_CODE(sample_covariance(std::vector<Point2>{{1, 1}}), ErrorCode::TooFewPoints);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> gx(5.0, 2.0), gy(-3.0, 1.0);
  std::vector<Point2> draws;
  for (int k = 0; k < 1000; ++k) draws.push_back({gx(rng), gy(rng)});
  const CovarianceMatrix2 est = sample_covariance(draws);
  CHECK(std::abs(est.c11 - 4.0) < 0.2 * 4.0);
  CHECK(std::abs(est.c22 - 1.0) < 0.2 * 1.0);
  CHECK(std::abs(est.c12) < 0.2);
}

TEST_CASE("sample covariance is symmetric PSD") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> n(2, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> pts;
    const int count = n(rng);
    for (int k = 0; k < count; ++k) pts.push_back({u(rng), u(rng)});
    const CovarianceMatrix2 c = sample_covariance(pts);
    CHECK(c.c11 >= 0.0);
    CHECK(c.c22 >= 0.0);
    CHECK(c.determinant() >= -1e-9 * (1.0 + c.c11 * c.c22));
  }
}

TEST_CASE("sigma decomposition") {
  const auto c = CovarianceMatrix2::from_sigmas(2.0, 3.0, 0.5);
  CHECK(c.c11 == doctest::Approx(4.0));
  CHECK(c.c22 == doctest::Approx(9.0));
  CHECK(c.c12 == doctest::Approx(3.0));
  CHECK(c.sigma1() == doctest::Approx(2.0));
  CHECK(c.sigma2() == doctest::Approx(3.0));
  CHECK(c.rho() == doctest::Approx(0.5));
  CHECK(CovarianceMatrix2{0, 0, 1}.rho() == 0.0);
}

TEST_CASE("covariance inverse") {
  const auto id = invert_covariance(CovarianceMatrix2::identity());
  CHECK(id == CovarianceMatrix2::identity());
  const auto d = invert_covariance({4, 0, 1});
  CHECK(d.c11 == doctest::Approx(0.25));
  CHECK(d.c22 == doctest::Approx(1.0));
  CHECK(d.c12 == doctest::Approx(0.0));

  const CovarianceMatrix2 c{2, 1, 2};
  const auto inv = invert_covariance(c);
  CHECK(inv.c11 == doctest::Approx(2.0 / 3.0));
  CHECK(inv.c12 == doctest::Approx(-1.0 / 3.0));
  CHECK(inv.c22 == doctest::Approx(2.0 / 3.0));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    // A A^T + small diagonal is PD.
    const double a = u(rng), b = u(rng), e = u(rng), f = u(rng);
    const CovarianceMatrix2 m{a * a + b * b + 0.01, a * e + b * f, e * e + f * f + 0.01};
    const auto i = invert_covariance(m);
    CHECK(std::abs(m.c11 * i.c11 + m.c12 * i.c12 - 1.0) < 1e-9);
    CHECK(std::abs(m.c11 * i.c12 + m.c12 * i.c22) < 1e-9);
    CHECK(std::abs(m.c12 * i.c11 + m.c22 * i.c12) < 1e-9);
    CHECK(std::abs(m.c12 * i.c12 + m.c22 * i.c22 - 1.0) < 1e-9);
  }
}

TEST_CASE("regularization") {
  // Singular but PSD: the ridge makes it invertible.
  const CovarianceMatrix2 rank_one{1, 1, 1};
  const auto r = regularized(rank_one);
  CHECK(r.c11 == doctest::Approx(1.0 + kCovarianceRidge));
  CHECK(r.positive_definite());
  CHECK_NOTHROW(invert_covariance(rank_one));
  CHECK(regularized(CovarianceMatrix2{0, 0, 0}).positive_definite());
  // Well-conditioned input is left alone.
  CHECK(regularized(CovarianceMatrix2{2, 1, 2}) == CovarianceMatrix2{2, 1, 2});
  // Indefinite: the ridge cannot rescue it.
  CHECK_THROWS_CODE(invert_covariance({1, 2, 1}), ErrorCode::SingularCovariance);
  CHECK_THROWS_CODE(invert_covariance({-1, 0, -1}), ErrorCode::SingularCovariance);
}

TEST_CASE("mahalanobis distance examples") {
  CHECK(mahalanobis_distance({3, 4}, {0, 0}, CovarianceMatrix2::identity()) == doctest::Approx(5.0));
  CHECK(mahalanobis_distance({2, 1}, {0, 0}, {4, 0, 1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(mahalanobis_distance({7, -2}, {7, -2}, {3, 1, 2}) == 0.0);
  CHECK(mahalanobis_distance({1, 2}, {4, 6}, {3, 1, 2}) ==
        doctest::Approx(mahalanobis_distance({4, 6}, {1, 2}, {3, 1, 2})));
}

TEST_CASE("mahalanobis matches the hand-rolled quadratic form") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_real_distribution<double> s(0.5, 3.0);
  std::uniform_real_distribution<double> r(-0.9, 0.9);
  for (int trial = 0; trial < 500; ++trial) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const auto c = CovarianceMatrix2::from_sigmas(s(rng), s(rng), r(rng));
    const double expected = oracle::quadratic_form({a.x, a.y}, {b.x, b.y}, c.c11, c.c12, c.c22);
    CHECK(squared_mahalanobis(a, b, c) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("identity covariance reduces to Euclidean") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double e = std::hypot(a.x - b.x, a.y - b.y);
    CHECK(std::abs(mahalanobis_distance(a, b, CovarianceMatrix2::identity()) - e) <= 1e-12 * std::max(1.0, e));
  }
}

TEST_CASE("affine invariance") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> s(0.5, 3.0);
  std::uniform_real_distribution<double> r(-0.9, 0.9);
  int tested = 0;
  while (tested < 200) {
    const double a11 = u(rng), a12 = u(rng), a21 = u(rng), a22 = u(rng);
    if (std::abs(a11 * a22 - a12 * a21) < 0.5) continue;
    const Point2 shift{u(rng), u(rng)};
    auto map = [&](Point2 p) { return Point2{a11 * p.x + a12 * p.y, a21 * p.x + a22 * p.y} + shift; };
    const auto c = CovarianceMatrix2::from_sigmas(s(rng), s(rng), r(rng));
    // A C A^T
    const double m11 = a11 * c.c11 + a12 * c.c12, m12 = a11 * c.c12 + a12 * c.c22;
    const double m21 = a21 * c.c11 + a22 * c.c12, m22 = a21 * c.c12 + a22 * c.c22;
    const CovarianceMatrix2 t{m11 * a11 + m12 * a12, m11 * a21 + m12 * a22, m21 * a21 + m22 * a22};
    const Point2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    CHECK(std::abs(mahalanobis_distance(map(x), map(y), t) - mahalanobis_distance(x, y, c)) < 1e-9);
    ++tested;
  }
}

TEST_CASE("distances to a centroid") {
  const std::vector<Point2> at_centroid(5, Point2{2, 3});
  for (double d : mahalanobis_to_centroid(at_centroid, {2, 3}, {2, 1, 2})) CHECK(d == 0.0);

  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<Point2> pts;
  for (int k = 0; k < 20; ++k) pts.push_back({u(rng), u(rng)});
  const Point2 centroid{1, -1};
  const auto euclid = mahalanobis_to_centroid(pts, centroid, CovarianceMatrix2::identity());
  const CovarianceMatrix2 c{3, -1, 2};
  const auto general = mahalanobis_to_centroid(pts, centroid, c);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CHECK(euclid[k] == doctest::Approx(distance(pts[k], centroid)).epsilon(1e-12));
    CHECK(general[k] == doctest::Approx(mahalanobis_distance(pts[k], centroid, c)).epsilon(1e-12));
  }
}

TEST_CASE("binomial pmf") {
  CHECK(binomial_pmf(0, 10, 0.4) == doctest::Approx(std::pow(0.6, 10)).epsilon(1e-12));
  CHECK(binomial_pmf(0, 10, 0.4) == doctest::Approx(6.04662e-3).epsilon(1e-5));
  CHECK(binomial_pmf(4, 10, 0.4) == doctest::Approx(210.0 * std::pow(0.4, 4) * std::pow(0.6, 6)).epsilon(1e-12));
  CHECK(binomial_pmf(4, 10, 0.4) == doctest::Approx(0.250823).epsilon(1e-5));
  double total = 0.0;
  for (unsigned x = 0; x <= 10; ++x) {
    const double p = binomial_pmf(x, 10, 0.4);
    CHECK(std::abs(p - oracle::binomial_direct(x, 10, 0.4)) < 1e-12);
    total += p;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);

  for (unsigned n : {1u, 7u, 20u, 45u, 60u}) {
    for (double w : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
      double sum = 0.0;
      for (unsigned x = 0; x <= n; ++x) sum += binomial_pmf(x, n, w);
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
  CHECK(binomial_pmf(0, 5, 0.0) == 1.0);
  CHECK(binomial_pmf(5, 5, 1.0) == 1.0);
  CHECK_THROWS_CODE(binomial_pmf(11, 10, 0.4), ErrorCode::OutOfDomain);
  CHECK_THROWS_CODE(binomial_pmf(1, 10, 1.5), ErrorCode::OutOfDomain);
  CHECK_THROWS_CODE(binomial_pmf(1, 10, -0.1), ErrorCode::OutOfDomain);
}

TEST_CASE("gaussian discriminant") {
  GroupModel m{0, {1, 2}, CovarianceMatrix2::identity(), 1.0};
  CHECK(gaussian_discriminant({1, 2}, m) == doctest::Approx(0.0));
  CHECK(gaussian_discriminant({3, 2}, m) == doctest::Approx(-2.0));

  GroupModel general{1, {0, 0}, {4, 1, 2}, 0.25};
  const Point2 z{1.5, -2};
  const double q = oracle::quadratic_form({z.x, z.y}, {0, 0}, 4, 1, 2);
  const double expected = std::log(0.25) - 0.5 * std::log(4.0 * 2.0 - 1.0) - 0.5 * q;
  CHECK(gaussian_discriminant(z, general) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(gaussian_discriminant(z, general, false) == doctest::Approx(expected - std::log(0.25)).epsilon(1e-12));

  // Adding ln(alpha) to every prior shifts every J equally.
  std::vector<GroupModel> models{{0, {0, 0}, {1, 0, 1}, 0.3}, {1, {5, 1}, {2, 0.5, 1}, 0.7}};
  const auto before = gaussian_discriminants(z, models);
  for (auto& g : models) g.prior *= 0.1;
  const auto after = gaussian_discriminants(z, models);
  CHECK(after[0] - before[0] == doctest::Approx(std::log(0.1)));
  CHECK(after[1] - before[1] == doctest::Approx(std::log(0.1)));
  for (std::size_t k = 0; k < models.size(); ++k) {
    CHECK(after[k] == doctest::Approx(gaussian_discriminant(z, models[k])).epsilon(1e-12));
  }
}

TEST_CASE("posterior examples") {
  std::vector<GroupModel> one{{4, {0, 0}, CovarianceMatrix2::identity(), 1.0}};
  CHECK(posterior({100, 100}, one).probabilities[0] == doctest::Approx(1.0));

  std::vector<GroupModel> twins{{0, {1, 1}, {2, 0, 2}, 0.5}, {1, {1, 1}, {2, 0, 2}, 0.5}};
  for (Point2 z : {Point2{0, 0}, Point2{50, -3}, Point2{1e3, 1e3}}) {
    const auto p = posterior(z, twins);
    CHECK(p.probabilities[0] == doctest::Approx(0.5));
    CHECK(p.probabilities[1] == doctest::Approx(0.5));
  }

  std::vector<GroupModel> apart{{0, {0, 0}, CovarianceMatrix2::identity(), 0.5},
                                {1, {10, 0}, CovarianceMatrix2::identity(), 0.5}};
  const auto p = posterior({0, 0}, apart);
  CHECK(p.probabilities[0] == doctest::Approx(1.0 / (1.0 + std::exp(-50.0))).epsilon(1e-15));
  CHECK(p.probabilities[1] == doctest::Approx(std::exp(-50.0) / (1.0 + std::exp(-50.0))).epsilon(1e-9));
  CHECK_FALSE(p.degenerate);

  // Far from every model the linear-space likelihoods underflow; log space copes.
  const auto far = posterior({1e5, 0}, apart);
  CHECK_FALSE(far.degenerate);
  CHECK(far.probabilities[1] == doctest::Approx(1.0));
}

TEST_CASE("degenerate posterior is flagged and uniform") {
  std::vector<GroupModel> apart{{0, {0, 0}, CovarianceMatrix2::identity(), 0.5},
                                {1, {10, 0}, CovarianceMatrix2::identity(), 0.5}};
  const auto p = posterior({INFINITY, 0}, apart);
  CHECK(p.degenerate);
  CHECK(p.probabilities[0] == doctest::Approx(0.5));
  CHECK(p.probabilities[1] == doctest::Approx(0.5));
}

TEST_CASE("classification") {
  std::vector<GroupModel> three{{0, {0, 0}, CovarianceMatrix2::identity(), 1.0},
                                {1, {30, 0}, CovarianceMatrix2::identity(), 1.0},
                                {2, {0, 30}, CovarianceMatrix2::identity(), 1.0}};
  normalize_priors(three);
  CHECK(classify({30, 0}, three) == 1);
  CHECK(classify({0, 30}, three) == 2);

  // Equidistant between identical models: the lower id wins, regardless of order.
  std::vector<GroupModel> pair{{7, {10, 0}, CovarianceMatrix2::identity(), 1.0},
                               {3, {-10, 0}, CovarianceMatrix2::identity(), 1.0}};
  normalize_priors(pair);
  CHECK(classify({0, 5}, pair) == 3);
}

TEST_CASE("priors normalise to one") {
  std::vector<GroupModel> m{{0, {}, {}, 2.0}, {1, {}, {}, 3.0}, {2, {}, {}, 5.0}};
  normalize_priors(m);
  CHECK(std::abs(m[0].prior + m[1].prior + m[2].prior - 1.0) < 1e-12);
  CHECK(m[2].prior == doctest::Approx(0.5));
}

TEST_CASE("posterior sums to one and agrees with classify") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::uniform_real_distribution<double> s(0.5, 5.0);
  std::uniform_real_distribution<double> r(-0.8, 0.8);
  std::uniform_real_distribution<double> pr(0.1, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<GroupModel> models;
    for (GroupId g = 0; g < 5; ++g) {
      models.push_back({g, {u(rng), u(rng)}, CovarianceMatrix2::from_sigmas(s(rng), s(rng), r(rng)), pr(rng)});
    }
    normalize_priors(models);
    const Point2 z{u(rng), u(rng)};
    const auto p = posterior(z, models);
    const double total = std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
    CHECK(std::abs(total - 1.0) < 1e-12);
    const auto best = std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin();
    CHECK(classify(z, models) == models[best].group_id);

    // Scaling every prior by a common constant leaves the decision alone.
    auto scaled = models;
    for (auto& g : scaled) g.prior *= 3.7;
    CHECK(classify(z, scaled) == classify(z, models));
  }
}

TEST_CASE("chi-square quantile") {
  CHECK(chi_square2_quantile(0.01) == doctest::Approx(9.21034).epsilon(1e-5));
  CHECK(chi_square2_quantile(0.05) == doctest::Approx(5.99146).epsilon(1e-5));
  CHECK_THROWS_CODE(chi_square2_quantile(0.0), ErrorCode::OutOfDomain);
  CHECK_THROWS_CODE(chi_square2_quantile(1.0), ErrorCode::OutOfDomain);
}

TEST_CASE("position fix covariance") {
  // Two orthogonal references with sigma 1 give the identity.
  const std::vector<Point2> refs{{10, 0}, {0, 10}};
  const std::vector<double> sig{1.0, 1.0};
  const auto c = position_fix_covariance({0, 0}, refs, sig);
  CHECK(c.c11 == doctest::Approx(1.0));
  CHECK(c.c22 == doctest::Approx(1.0));
  CHECK(c.c12 == doctest::Approx(0.0).scale(1.0));
  const std::vector<double> zero{0.0, 0.0};
  CHECK(position_fix_covariance({0, 0}, refs, zero) == CovarianceMatrix2{});
  const std::vector<Point2> line{{10, 0}, {20, 0}};
  CHECK_THROWS_CODE(position_fix_covariance({0, 0}, line, sig), ErrorCode::SingularCovariance);
}
