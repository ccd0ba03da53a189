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
#include <set>
#include <span>
#include <vector>

#include "wsnloc/config.hpp"
#include "wsnloc/geometry.hpp"
#include "wsnloc/stats.hpp"

namespace wsnloc {

using NodeId = std::uint32_t;

struct AnchorNode {
  NodeId id = 0;
  Point2 true_position;
  Point2 advertised_position;
  std::vector<GroupId> group_ids;
  bool compromised = false;

  friend bool operator==(const AnchorNode&, const AnchorNode&) = default;
};

/// Deployment-time record of a group solving its own trilateration point (M1).
struct GroupRecord {
  Point2 trilaterated_point;
  std::vector<Meters> member_distances;  // aligned with TrilaterationGroup::members

  friend bool operator==(const GroupRecord&, const GroupRecord&) = default;
};

/// Deployment-time record of one member localised against the reference
/// points of neighbouring groups (M2, M3, ...).
struct CrossReference {
  NodeId member = 0;
  std::vector<GroupId> groups;     // neighbour groups, nearest first
  std::vector<Meters> distances;   // member to each neighbour's reference point
  Point2 located_position;         // fix from own + neighbour reference points

  friend bool operator==(const CrossReference&, const CrossReference&) = default;
};

struct TrilaterationGroup {
  GroupId id = 0;
  std::vector<NodeId> members;
  Point2 reference_point;
  GroupRecord m1;
  std::vector<GroupId> neighbours;
  std::vector<CrossReference> cross_references;  // aligned with members
  bool usable = true;

  friend bool operator==(const TrilaterationGroup&, const TrilaterationGroup&) = default;
};

struct Network {
  Meters width = 0.0;
  Meters height = 0.0;
  std::vector<AnchorNode> anchors;  // anchors[i].id == i
  std::vector<TrilaterationGroup> groups;  // groups[g].id == g
  std::set<NodeId> blacklist;
  std::uint64_t rng_seed = 0;

  const AnchorNode& anchor(NodeId id) const;
  bool contains(NodeId id) const { return id < anchors.size(); }
  bool blacklisted(NodeId id) const { return blacklist.contains(id); }
  std::size_t usable_group_count() const;

  friend bool operator==(const Network&, const Network&) = default;
};

/// Places config.node_count anchors: a random seed triple, an anchor on its
/// trilateration point, then groups of three grown around a previously placed
/// anchor used as each new group's reference point. Records M1 and the cross
/// references. Deterministic in (config, seed).
Network deploy(const ExperimentConfig& config, std::uint64_t seed);

/// Measured range for a true distance; never negative.
Meters measure_distance(Meters true_distance, const RangingModel& model, Rng& rng);

/// One-sigma range error of the model at a given distance (0 for exact).
Meters range_sigma(Meters true_distance, const RangingModel& model);

struct AttackSpec {
  Meters displacement_min = 0.0;
  Meters displacement_max = 0.0;
};

/// Spoofs the advertised position of each id by a uniform radius and angle.
/// Draws happen in id-list order, two per id.
Network compromise(Network network, std::span<const NodeId> node_ids, const AttackSpec& attack,
                   Rng& rng);

/// Masks ids from every later solve; groups left with fewer than three usable
/// members become unusable.
Network blacklist(Network network, std::span<const NodeId> node_ids);

/// Reference points for a member fix: own group's point then its neighbours'.
std::vector<Point2> fix_references(const Network& network, const TrilaterationGroup& group);

/// Range an anchor reports to a point. A compromised anchor reports ranges
/// consistent with the position it advertises.
Meters reported_range(const AnchorNode& anchor, Point2 point, const RangingModel& model, Rng& rng);

}  // namespace wsnloc
