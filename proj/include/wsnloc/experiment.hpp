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
#include <string_view>
#include <vector>

#include "wsnloc/config.hpp"
#include "wsnloc/detection.hpp"

namespace wsnloc {

struct TrialResult {
  Method method = Method::Trilateration;
  std::uint32_t malicious_count = 0;
  std::uint32_t trial_index = 0;
  std::uint64_t seed = 0;  // detection stream
  Meters error = 0.0;
  double precision = 1.0;
  double recall = 1.0;
  double elapsed = 0.0;
  std::vector<NodeId> compromised;
  std::vector<NodeId> suspects;
};

struct MetricsRow {
  Method method = Method::Trilateration;
  std::uint32_t malicious_count = 0;
  Meters mean_error = 0.0;
  Meters error_stddev = 0.0;
  double mean_elapsed = 0.0;
  double precision = 1.0;
  double recall = 1.0;
};

struct ExperimentResult {
  Meters epsilon = 0.0;  // value actually used by the trilateration detector
  std::vector<MetricsRow> rows;
  std::vector<TrialResult> trials;  // sorted by (method, count, index) in config order
};

/// Stable 64-bit seed from a tag and up to three integers (splitmix64 over FNV-1a).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// config.epsilon, or the value estimated on an honest deployment.
Meters resolve_epsilon(const ExperimentConfig& config);

DetectorOptions detector_options(const ExperimentConfig& config);

/// One seeded trial. The deployment, the attacked set and the detector's
/// stream depend only on (master_seed, trial_index), so methods and malicious
/// counts are compared on common networks with common per-anchor noise.
TrialResult run_trial(const ExperimentConfig& config, Method method, std::uint32_t malicious_count,
                      std::uint32_t trial_index);

/// Every method x malicious count, `trials` trials each, aggregated.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Folds trials (already in index order) into one row.
MetricsRow aggregate(Method method, std::uint32_t malicious_count, std::span<const TrialResult> trials);

}  // namespace wsnloc
