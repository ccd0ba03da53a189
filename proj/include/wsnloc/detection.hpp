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

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "wsnloc/config.hpp"
#include "wsnloc/network.hpp"
#include "wsnloc/stats.hpp"

namespace wsnloc {

struct DetectionVerdict {
  Method method = Method::Trilateration;
  std::set<NodeId> suspects;
  /// Per evaluated anchor; larger means more suspicious for every method.
  std::map<NodeId, double> scores;
  /// Recovered (false) location of each suspect.
  std::map<NodeId, Point2> estimated_positions;
  double elapsed = 0.0;  // seconds, wall time of the detect call
};

struct DetectorOptions {
  ModelMean model_mean = ModelMean::PerAnchor;
  NoiseCovariance noise_covariance = NoiseCovariance::Propagated;
  Meters radio_range = 250.0;
};

/// Group check against M1 followed by individual fixes of the members of
/// failing groups against the deployment-time cross references.
DetectionVerdict detect_trilateration(const Network& network, const RangingModel& ranging, Meters epsilon,
                                      Rng& rng, const DetectorOptions& options = {});

/// Chi-square test on the change of each member's offset from its group's
/// trilateration point, in the Mahalanobis metric of the fix noise.
DetectionVerdict detect_mahalanobis(const Network& network, const RangingModel& ranging, double alpha,
                                    Rng& rng, const DetectorOptions& options = {});

/// Gaussian membership test per member plus a maximum-discriminant
/// classification cross-check over every group's models.
DetectionVerdict detect_mle(const Network& network, const RangingModel& ranging, double alpha, Rng& rng,
                            const DetectorOptions& options = {});

DetectionVerdict detect(Method method, const Network& network, const RangingModel& ranging, Meters epsilon,
                        double alpha, Rng& rng, const DetectorOptions& options = {});

/// Mean over compromised anchors of |estimate - advertised|; an undetected
/// anchor contributes its spoof magnitude. 0 with no compromised anchors.
Meters localization_error(const DetectionVerdict& verdict, const Network& network);

// Building blocks shared by the detectors (and by tests that re-derive them).

/// One group member, as seen by the statistical detectors.
struct MemberView {
  GroupId group = 0;
  NodeId node = 0;
  std::size_t slot = 0;  // index in group.members
};

/// Members of usable groups, not blacklisted, whose group has at least two
/// neighbours (enough reference points for a fix);
/// in group then member order. Throws NoUsableGroups.
std::vector<MemberView> evaluated_members(const Network& network);

/// Fix of a member against its own and neighbouring reference points using
/// the ranges it reports. Draws one range per reference point.
Point2 localize_member(const Network& network, const MemberView& member, const RangingModel& ranging, Rng& rng);

/// Each detector draws a single base value from the caller's stream and
/// takes every fix from a stream keyed on (base, member). Detectors and
/// attacked sets that share a base therefore see the same noise per anchor.
Rng member_stream(std::uint64_t base, const MemberView& member);

/// Measurement covariance of a member's fix at its recorded location.
CovarianceMatrix2 member_fix_covariance(const Network& network, const MemberView& member,
                                        const RangingModel& ranging, NoiseCovariance mode);

/// Gaussian models for the likelihood detector, aligned with `members`
/// (per-anchor means) or one per usable group (centroid means). Uniform priors.
std::vector<GroupModel> build_mle_models(const Network& network, std::span<const MemberView> members,
                                         const RangingModel& ranging, const DetectorOptions& options);

/// 3 x RMS fix deviation of honest members under `ranging`, estimated over
/// `replications` noisy fixes per member. Floored at 1e-3 m.
Meters estimate_epsilon(const Network& network, const RangingModel& ranging, Rng& rng, int replications = 10);

}  // namespace wsnloc
