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
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wsnloc/geometry.hpp"

namespace wsnloc {

using Rng = std::mt19937_64;

enum class RangingKind { Exact, Gaussian, LogNormal };

/// Parametric noise on true distance (abstracts RSSI / ToA / TDoA ranging).
struct RangingModel {
  RangingKind kind = RangingKind::Gaussian;
  Meters sigma = 2.0;               // gaussian
  double sigma_db = 4.0;            // lognormal shadowing
  double path_loss_exponent = 3.0;  // lognormal

  static RangingModel exact() { return {RangingKind::Exact, 0.0, 0.0, 3.0}; }
  static RangingModel gaussian(Meters s) { return {RangingKind::Gaussian, s, 0.0, 3.0}; }
  static RangingModel lognormal(double db, double eta) { return {RangingKind::LogNormal, 0.0, db, eta}; }
};

enum class Method { Trilateration, Mahalanobis, Mle };

std::string_view to_string(Method method);
std::string_view to_string(RangingKind kind);
/// Throws ConfigInvalid for unknown names.
Method parse_method(std::string_view name);
RangingKind parse_ranging_kind(std::string_view name);

/// Mean used for the per-member Gaussian models of the likelihood detector.
enum class ModelMean { PerAnchor, GroupCentroid };
/// Covariance used by the statistical detectors.
enum class NoiseCovariance { Propagated, Identity };

std::string_view to_string(ModelMean mean);
std::string_view to_string(NoiseCovariance covariance);

struct ExperimentConfig {
  Meters area_width = 600.0;
  Meters area_height = 600.0;
  std::uint32_t node_count = 117;
  std::uint32_t trials = 50;
  std::vector<std::uint32_t> malicious_counts{5, 10, 15, 20};
  RangingModel ranging = RangingModel::gaussian(2.0);
  std::optional<Meters> epsilon;  // empty: estimated from the ranging model
  double alpha = 0.01;
  Meters displacement_min = 20.0;
  Meters displacement_max = 60.0;
  std::uint64_t master_seed = 117;
  std::vector<Method> methods{Method::Trilateration, Method::Mahalanobis, Method::Mle};

  // Deployment geometry.
  Meters group_radius = 20.0;      // new members land within this radius of the group's point
  Meters min_separation = 2.0;     // between any two anchors
  double min_fix_area = 25.0;      // m^2, triangle of reference points used for a member fix
  std::uint32_t neighbour_count = 6;  // groups a member is cross-referenced against
  Meters radio_range = 250.0;      // reference points usable when refining a suspect

  ModelMean model_mean = ModelMean::PerAnchor;
  NoiseCovariance noise_covariance = NoiseCovariance::Propagated;
  std::uint32_t threads = 0;  // 0: hardware concurrency

  /// Throws ConfigInvalid on out-of-range fields.
  void validate() const;
};

/// Parses the `key = value` text format. Keys mirror the ExperimentConfig
/// field names; '#' starts a comment; unknown or repeated keys are errors.
/// Lists are comma separated. `epsilon = auto` selects the estimated value.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& config);

}  // namespace wsnloc
