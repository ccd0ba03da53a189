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

#include "wsnloc/detection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace wsnloc {

namespace {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void require_usable_groups(const Network& network) {
  if (network.usable_group_count() == 0) {
    throw Error(ErrorCode::NoUsableGroups, "every trilateration group is blacklisted or unusable");
  }
}

void record_score(DetectionVerdict& verdict, NodeId node, double score) {
  auto [it, inserted] = verdict.scores.emplace(node, score);
  if (!inserted) it->second = std::max(it->second, score);
}

enum class Stream : std::uint64_t { Fix = 1, Consistency = 2, Refine = 3 };

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng keyed_stream(std::uint64_t base, Stream kind, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(mix(mix(mix(base ^ static_cast<std::uint64_t>(kind)) ^ a) ^ b));
}

// Suspect positions (memory M_N): refine the initial fix against every
// reference point within radio range.
void refine_suspects(const Network& network, const RangingModel& ranging, const DetectorOptions& options,
                     std::uint64_t base, DetectionVerdict& verdict) {
  for (NodeId id : verdict.suspects) {
    Rng rng = keyed_stream(base, Stream::Refine, id);
    const Point2 initial = verdict.estimated_positions.at(id);
    const AnchorNode& node = network.anchor(id);
    TrilaterationProblem problem;
    for (const auto& g : network.groups) {
      if (distance(g.reference_point, initial) <= options.radio_range) {
        problem.anchors.push_back(g.reference_point);
      }
    }
    if (problem.anchors.size() < 3) continue;
    for (const Point2& ref : problem.anchors) problem.distances.push_back(reported_range(node, ref, ranging, rng));
    verdict.estimated_positions[id] = refine_position(problem, initial).position;
  }
}

const CrossReference& record_of(const Network& network, const MemberView& member) {
  return network.groups[member.group].cross_references[member.slot];
}

}  // namespace

std::vector<MemberView> evaluated_members(const Network& network) {
  require_usable_groups(network);
  std::vector<MemberView> out;
  for (const auto& g : network.groups) {
    if (!g.usable || g.neighbours.size() < 2) continue;
    for (std::size_t slot = 0; slot < g.members.size(); ++slot) {
      if (network.blacklisted(g.members[slot])) continue;
      out.push_back({g.id, g.members[slot], slot});
    }
  }
  return out;
}

Point2 localize_member(const Network& network, const MemberView& member, const RangingModel& ranging, Rng& rng) {
  const auto& group = network.groups[member.group];
  const AnchorNode& node = network.anchor(member.node);
  TrilaterationProblem problem;
  problem.anchors = fix_references(network, group);
  for (const Point2& ref : problem.anchors) problem.distances.push_back(reported_range(node, ref, ranging, rng));
  return solve_position(problem).position;
}

Rng member_stream(std::uint64_t base, const MemberView& member) {
  return keyed_stream(base, Stream::Fix, member.node, member.group);
}

CovarianceMatrix2 member_fix_covariance(const Network& network, const MemberView& member,
                                        const RangingModel& ranging, NoiseCovariance mode) {
  if (mode == NoiseCovariance::Identity) return CovarianceMatrix2::identity();
  const Point2 located = record_of(network, member).located_position;
  const std::vector<Point2> refs = fix_references(network, network.groups[member.group]);
  std::vector<double> sigmas;
  for (const Point2& ref : refs) sigmas.push_back(range_sigma(distance(located, ref), ranging));
  return position_fix_covariance(located, refs, sigmas);
}

std::vector<GroupModel> build_mle_models(const Network& network, std::span<const MemberView> members,
                                         const RangingModel& ranging, const DetectorOptions& options) {
  std::vector<GroupModel> models;
  if (options.model_mean == ModelMean::PerAnchor) {
    for (const MemberView& m : members) {
      GroupModel model;
      model.group_id = m.group;
      model.mean = record_of(network, m).located_position;
      model.covariance = member_fix_covariance(network, m, ranging, options.noise_covariance);
      models.push_back(model);
    }
  } else {
    // One model per group: mean of the recorded member positions, spread of
    // those positions plus the average fix noise.
    std::map<GroupId, std::vector<MemberView>> by_group;
    for (const MemberView& m : members) by_group[m.group].push_back(m);
    for (const auto& [gid, views] : by_group) {
      std::vector<Point2> pts;
      CovarianceMatrix2 noise;
      for (const MemberView& m : views) {
        pts.push_back(record_of(network, m).located_position);
        const CovarianceMatrix2 c = member_fix_covariance(network, m, ranging, options.noise_covariance);
        noise = {noise.c11 + c.c11, noise.c12 + c.c12, noise.c22 + c.c22};
      }
      const double n = static_cast<double>(views.size());
      Point2 mean;
      for (const Point2& p : pts) mean = mean + p;
      GroupModel model;
      model.group_id = gid;
      model.mean = (1.0 / n) * mean;
      const CovarianceMatrix2 spread = pts.size() >= 2 ? sample_covariance(pts) : CovarianceMatrix2{};
      model.covariance = {spread.c11 + noise.c11 / n, spread.c12 + noise.c12 / n, spread.c22 + noise.c22 / n};
      models.push_back(model);
    }
  }
  for (auto& m : models) m.prior = 1.0;
  normalize_priors(models);
  return models;
}

DetectionVerdict detect_trilateration(const Network& network, const RangingModel& ranging, Meters epsilon,
                                      Rng& rng, const DetectorOptions& options) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::OutOfDomain, "epsilon must be > 0");
  const WallTimer timer;
  require_usable_groups(network);
  const std::uint64_t base = rng();
  DetectionVerdict verdict;
  verdict.method = Method::Trilateration;

  // Phase 1: each group re-solves its trilateration point from the positions
  // its members advertise and the ranges recorded in M1.
  std::vector<GroupId> failing;
  for (const auto& g : network.groups) {
    if (!g.usable) continue;
    Rng group_rng = keyed_stream(base, Stream::Consistency, g.id);
    TrilaterationProblem problem;
    for (std::size_t slot = 0; slot < g.members.size(); ++slot) {
      if (network.blacklisted(g.members[slot])) continue;
      problem.anchors.push_back(network.anchor(g.members[slot]).advertised_position);
      problem.distances.push_back(measure_distance(g.m1.member_distances[slot], ranging, group_rng));
    }
    bool consistent = false;
    try {
      const LocalizationResult fix =
          problem.size() == 3 ? solve_trilateration_exact(problem) : solve_multilateration_lsq(problem);
      consistent = distance(fix.position, g.reference_point) <= epsilon;
    } catch (const Error&) {
      consistent = false;  // advertised positions no longer form a valid frame
    }
    if (!consistent) failing.push_back(g.id);
  }

  // Phase 2: members of failing groups are fixed individually against the
  // neighbouring groups and compared with their cross references.
  for (GroupId gid : failing) {
    const auto& g = network.groups[gid];
    if (g.neighbours.size() < 2) continue;
    for (std::size_t slot = 0; slot < g.members.size(); ++slot) {
      const NodeId node = g.members[slot];
      if (network.blacklisted(node)) continue;
      const MemberView view{gid, node, slot};
      Rng fix_rng = member_stream(base, view);
      const Point2 z = localize_member(network, view, ranging, fix_rng);
      const double deviation = distance(z, g.cross_references[slot].located_position);
      record_score(verdict, node, deviation);
      if (deviation > epsilon && !verdict.suspects.contains(node)) {
        verdict.suspects.insert(node);
        verdict.estimated_positions[node] = z;
      }
    }
  }
  refine_suspects(network, ranging, options, base, verdict);
  verdict.elapsed = timer.seconds();
  return verdict;
}

DetectionVerdict detect_mahalanobis(const Network& network, const RangingModel& ranging, double alpha, Rng& rng,
                                    const DetectorOptions& options) {
  const double threshold = chi_square2_quantile(alpha);
  const WallTimer timer;
  const std::vector<MemberView> members = evaluated_members(network);
  const std::uint64_t base = rng();
  DetectionVerdict verdict;
  verdict.method = Method::Mahalanobis;

  for (const MemberView& m : members) {
    Rng fix_rng = member_stream(base, m);
    const Point2 z = localize_member(network, m, ranging, fix_rng);
    // Change of the member's offset from the group centroid since
    // deployment, measured in the noise metric.
    const Point2 centroid = network.groups[m.group].reference_point;
    const Point2 now = z - centroid;
    const Point2 then = record_of(network, m).located_position - centroid;
    const CovarianceMatrix2 c = member_fix_covariance(network, m, ranging, options.noise_covariance);
    const double score = squared_mahalanobis(now, then, c);
    record_score(verdict, m.node, score);
    if (score > threshold && !verdict.suspects.contains(m.node)) {
      verdict.suspects.insert(m.node);
      verdict.estimated_positions[m.node] = z;
    }
  }
  refine_suspects(network, ranging, options, base, verdict);
  verdict.elapsed = timer.seconds();
  return verdict;
}

DetectionVerdict detect_mle(const Network& network, const RangingModel& ranging, double alpha, Rng& rng,
                            const DetectorOptions& options) {
  const double threshold = chi_square2_quantile(alpha);
  const WallTimer timer;
  const std::vector<MemberView> members = evaluated_members(network);
  const std::vector<GroupModel> models = build_mle_models(network, members, ranging, options);
  const std::uint64_t base = rng();
  DetectionVerdict verdict;
  verdict.method = Method::Mle;

  std::map<GroupId, std::size_t> group_model;
  for (std::size_t k = 0; k < models.size(); ++k) group_model.emplace(models[k].group_id, k);

  for (std::size_t k = 0; k < members.size(); ++k) {
    const MemberView& m = members[k];
    Rng fix_rng = member_stream(base, m);
    const Point2 z = localize_member(network, m, ranging, fix_rng);
    const GroupModel& own =
        options.model_mean == ModelMean::PerAnchor ? models[k] : models[group_model.at(m.group)];
    const double membership = squared_mahalanobis(z, own.mean, own.covariance);
    const GroupId assigned = models[classify_index(z, models)].group_id;
    const auto& own_groups = network.anchor(m.node).group_ids;
    const bool misclassified = std::find(own_groups.begin(), own_groups.end(), assigned) == own_groups.end();
    record_score(verdict, m.node, membership);
    if ((membership > threshold || misclassified) && !verdict.suspects.contains(m.node)) {
      verdict.suspects.insert(m.node);
      verdict.estimated_positions[m.node] = z;
    }
  }
  refine_suspects(network, ranging, options, base, verdict);
  verdict.elapsed = timer.seconds();
  return verdict;
}

DetectionVerdict detect(Method method, const Network& network, const RangingModel& ranging, Meters epsilon,
                        double alpha, Rng& rng, const DetectorOptions& options) {
  switch (method) {
    case Method::Trilateration: return detect_trilateration(network, ranging, epsilon, rng, options);
    case Method::Mahalanobis: return detect_mahalanobis(network, ranging, alpha, rng, options);
    case Method::Mle: return detect_mle(network, ranging, alpha, rng, options);
  }
  throw Error(ErrorCode::OutOfDomain, "unknown method");
}

Meters localization_error(const DetectionVerdict& verdict, const Network& network) {
  double total = 0.0;
  std::size_t count = 0;
  for (const AnchorNode& a : network.anchors) {
    if (!a.compromised) continue;
    ++count;
    const auto it = verdict.estimated_positions.find(a.id);
    total += it != verdict.estimated_positions.end() ? distance(it->second, a.advertised_position)
                                                     : distance(a.true_position, a.advertised_position);
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

Meters estimate_epsilon(const Network& network, const RangingModel& ranging, Rng& rng, int replications) {
  const std::vector<MemberView> members = evaluated_members(network);
  double sum_sq = 0.0;
  std::size_t samples = 0;
  for (int r = 0; r < replications; ++r) {
    for (const MemberView& m : members) {
      const Point2 z = localize_member(network, m, ranging, rng);
      const double d = distance(z, record_of(network, m).located_position);
      sum_sq += d * d;
      ++samples;
    }
  }
  const double rms = samples == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(samples));
  return std::max(1e-3, 3.0 * rms);
}

}  // namespace wsnloc
