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

#include "wsnloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace wsnloc {

const AnchorNode& Network::anchor(NodeId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownNode, "no anchor with id " + std::to_string(id));
  return anchors[id];
}

std::size_t Network::usable_group_count() const {
  return static_cast<std::size_t>(
      std::count_if(groups.begin(), groups.end(), [](const auto& g) { return g.usable; }));
}

Meters measure_distance(Meters true_distance, const RangingModel& model, Rng& rng) {
  switch (model.kind) {
    case RangingKind::Exact:
      return true_distance;
    case RangingKind::Gaussian: {
      if (!(model.sigma > 0.0)) return true_distance;
      std::normal_distribution<double> noise(0.0, model.sigma);
      return std::max(0.0, true_distance + noise(rng));
    }
    case RangingKind::LogNormal: {
      if (!(model.sigma_db > 0.0)) return true_distance;
      std::normal_distribution<double> shadowing(0.0, model.sigma_db);
      const double x = shadowing(rng);
      return std::max(0.0, true_distance * std::pow(10.0, x / (10.0 * model.path_loss_exponent)));
    }
  }
  return true_distance;
}

Meters range_sigma(Meters true_distance, const RangingModel& model) {
  switch (model.kind) {
    case RangingKind::Exact:
      return 0.0;
    case RangingKind::Gaussian:
      return std::max(0.0, model.sigma);
    case RangingKind::LogNormal:
      // First-order spread of d * 10^(X / (10 eta)).
      return true_distance * std::numbers::ln10 * model.sigma_db / (10.0 * model.path_loss_exponent);
  }
  return 0.0;
}

Meters reported_range(const AnchorNode& anchor, Point2 point, const RangingModel& model, Rng& rng) {
  return measure_distance(distance(anchor.advertised_position, point), model, rng);
}

std::vector<Point2> fix_references(const Network& network, const TrilaterationGroup& group) {
  std::vector<Point2> refs{group.reference_point};
  for (GroupId h : group.neighbours) refs.push_back(network.groups[h].reference_point);
  return refs;
}

namespace {

constexpr int kPointAttempts = 2000;
constexpr int kGroupAttempts = 500;
constexpr std::size_t kPairCandidates = 8;

class Deployer {
 public:
  Deployer(const ExperimentConfig& config, std::uint64_t seed) : config_(config), rng_(seed) {
    network_.width = config.area_width;
    network_.height = config.area_height;
    network_.rng_seed = seed;
  }

  Network run() {
    place_seed_group();
    while (network_.anchors.size() < config_.node_count) place_next_group();
    link_neighbours();
    record_memories();
    return std::move(network_);
  }

 private:
  bool inside(Point2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= network_.width && p.y <= network_.height;
  }

  bool clear_of_others(Point2 p, std::span<const Point2> pending) const {
    for (const auto& a : network_.anchors) {
      if (distance(a.true_position, p) < config_.min_separation) return false;
    }
    for (const Point2& q : pending) {
      if (distance(q, p) < config_.min_separation) return false;
    }
    return true;
  }

  // Uniform over the annulus [min_separation, group_radius] around `centre`,
  // clipped to the area and kept clear of every other anchor.
  Point2 sample_around(Point2 centre, std::span<const Point2> pending) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r_lo = config_.min_separation;
    const double r_hi = config_.group_radius;
    for (int attempt = 0; attempt < kPointAttempts; ++attempt) {
      const double r = std::sqrt(r_lo * r_lo + unit(rng_) * (r_hi * r_hi - r_lo * r_lo));
      const double theta = 2.0 * std::numbers::pi * unit(rng_);
      const Point2 p = centre + Point2{r * std::cos(theta), r * std::sin(theta)};
      if (inside(p) && clear_of_others(p, pending)) return p;
    }
    throw Error(ErrorCode::ConfigInvalid, "deployment area too crowded to place another anchor");
  }

  NodeId add_anchor(Point2 p) {
    AnchorNode node;
    node.id = static_cast<NodeId>(network_.anchors.size());
    node.true_position = p;
    node.advertised_position = p;
    network_.anchors.push_back(node);
    return node.id;
  }

  void add_group(std::vector<NodeId> members, Point2 reference_point) {
    TrilaterationGroup group;
    group.id = static_cast<GroupId>(network_.groups.size());
    group.members = std::move(members);
    group.reference_point = reference_point;
    for (NodeId m : group.members) network_.anchors[m].group_ids.push_back(group.id);
    network_.groups.push_back(std::move(group));
  }

  bool well_shaped(std::span<const Point2> pts) const {
    return pts.size() == 3 && triangle_area(pts[0], pts[1], pts[2]) >= config_.min_fix_area;
  }

  void place_seed_group() {
    const double r = config_.group_radius;
    std::uniform_real_distribution<double> ux(r, network_.width - r);
    std::uniform_real_distribution<double> uy(r, network_.height - r);
    const Point2 seed_point{ux(rng_), uy(rng_)};
    for (int attempt = 0; attempt < kGroupAttempts; ++attempt) {
      std::vector<Point2> pts;
      for (int k = 0; k < 3; ++k) pts.push_back(sample_around(seed_point, pts));
      if (!well_shaped(pts)) continue;
      const Point2 centroid = (1.0 / 3.0) * (pts[0] + pts[1] + pts[2]);
      if (!std::all_of(pts.begin(), pts.end(), [&](Point2 p) {
            return distance(p, centroid) >= config_.min_separation;
          })) {
        continue;
      }
      std::vector<NodeId> ids;
      for (const Point2& p : pts) ids.push_back(add_anchor(p));
      add_group(std::move(ids), centroid);
      return;
    }
    throw Error(ErrorCode::ConfigInvalid, "could not place a non-degenerate seed group");
  }

  // Next group: its reference point is a member of the previous group; an
  // anchor goes onto the seed group's trilateration point first.
  void place_next_group() {
    const TrilaterationGroup previous = network_.groups.back();
    std::vector<NodeId> candidates;
    for (NodeId m : previous.members) {
      if (!on_reference_point_.contains(m) && !used_as_reference_.contains(m)) candidates.push_back(m);
    }
    if (candidates.empty()) throw Error(ErrorCode::ConfigInvalid, "no anchor left to seed a new group");
    // Grow outwards: the candidate farthest from every existing reference
    // point, so the groups spread over the area instead of piling up.
    NodeId centre_id = candidates.front();
    double widest = -1.0;
    for (NodeId c : candidates) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& g : network_.groups) {
        nearest = std::min(nearest, distance(network_.anchors[c].true_position, g.reference_point));
      }
      if (nearest > widest) {
        widest = nearest;
        centre_id = c;
      }
    }
    const Point2 centre = network_.anchors[centre_id].true_position;
    used_as_reference_.insert(centre_id);

    const std::size_t remaining = config_.node_count - network_.anchors.size();
    const std::size_t fresh = std::min<std::size_t>(3, remaining);
    const bool anchor_on_seed_point = network_.groups.size() == 1;

    for (int attempt = 0; attempt < kGroupAttempts; ++attempt) {
      std::vector<Point2> pts;
      if (anchor_on_seed_point) pts.push_back(previous.reference_point);
      while (pts.size() < fresh) pts.push_back(sample_around(centre, pts));

      // Short final group: borrow the previous group's members nearest the centre.
      std::vector<NodeId> borrowed;
      if (pts.size() < 3) {
        std::vector<NodeId> pool;
        for (NodeId m : previous.members) {
          if (m != centre_id) pool.push_back(m);
        }
        std::sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) {
          const double da = distance(network_.anchors[a].true_position, centre);
          const double db = distance(network_.anchors[b].true_position, centre);
          return da != db ? da < db : a < b;
        });
        std::vector<Point2> all = pts;
        for (NodeId m : pool) {
          if (all.size() == 3) break;
          borrowed.push_back(m);
          all.push_back(network_.anchors[m].true_position);
        }
        if (!well_shaped(all)) continue;
      } else if (!well_shaped(pts)) {
        continue;
      }

      std::vector<NodeId> ids;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const NodeId id = add_anchor(pts[k]);
        if (anchor_on_seed_point && k == 0) on_reference_point_.insert(id);
        ids.push_back(id);
      }
      ids.insert(ids.end(), borrowed.begin(), borrowed.end());
      add_group(std::move(ids), centre);
      return;
    }
    throw Error(ErrorCode::ConfigInvalid, "could not place a non-degenerate group");
  }

  // Mean geometric dilution of precision of the group's members against
  // the three reference points; infinite for a degenerate triangle.
  double mean_gdop(const TrilaterationGroup& g, std::span<const Point2> refs) const {
    if (triangle_area(refs[0], refs[1], refs[2]) < config_.min_fix_area) {
      return std::numeric_limits<double>::infinity();
    }
    const std::vector<double> unit_sigmas(refs.size(), 1.0);
    double total = 0.0;
    for (NodeId m : g.members) {
      try {
        const CovarianceMatrix2 c = position_fix_covariance(network_.anchors[m].true_position, refs, unit_sigmas);
        total += std::sqrt(c.c11 + c.c22);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return total / static_cast<double>(g.members.size());
  }

  // Neighbours: the pair among the nearest groups (by reference-point
  // distance) that gives the members the best-conditioned fix, topped up
  // with the next nearest groups.
  void link_neighbours() {
    auto& groups = network_.groups;
    for (auto& g : groups) {
      std::vector<GroupId> order;
      for (const auto& h : groups) {
        if (h.id != g.id) order.push_back(h.id);
      }
      std::sort(order.begin(), order.end(), [&](GroupId a, GroupId b) {
        const double da = distance(groups[a].reference_point, g.reference_point);
        const double db = distance(groups[b].reference_point, g.reference_point);
        return da != db ? da < db : a < b;
      });
      double best = std::numeric_limits<double>::infinity();
      std::vector<GroupId> chosen;
      const std::size_t pool = std::min(order.size(), kPairCandidates);
      for (std::size_t a = 0; a < pool; ++a) {
        for (std::size_t b = a + 1; b < pool; ++b) {
          const Point2 refs[3] = {g.reference_point, groups[order[a]].reference_point,
                                  groups[order[b]].reference_point};
          const double score = mean_gdop(g, refs);
          if (score < best) {
            best = score;
            chosen = {order[a], order[b]};
          }
        }
      }
      // Fall back to the nearest group alone so the group still has a
      // cross reference, although it cannot fix its members.
      if (chosen.empty() && !order.empty()) chosen = {order.front()};
      for (GroupId h : order) {
        if (chosen.size() >= config_.neighbour_count) break;
        if (chosen.size() >= 2 && std::find(chosen.begin(), chosen.end(), h) == chosen.end()) chosen.push_back(h);
      }
      g.neighbours = chosen;
    }
  }

  void record_memories() {
    for (auto& g : network_.groups) {
      TrilaterationProblem own;
      for (NodeId m : g.members) {
        const Point2 p = network_.anchors[m].true_position;
        own.anchors.push_back(p);
        own.distances.push_back(distance(p, g.reference_point));
      }
      g.m1.member_distances = own.distances;
      g.m1.trilaterated_point = solve_trilateration_exact(own).position;

      const std::vector<Point2> refs = fix_references(network_, g);
      for (NodeId m : g.members) {
        const Point2 p = network_.anchors[m].true_position;
        CrossReference record;
        record.member = m;
        record.groups = g.neighbours;
        for (GroupId h : g.neighbours) record.distances.push_back(distance(p, network_.groups[h].reference_point));
        record.located_position = p;
        if (refs.size() >= 3) {
          TrilaterationProblem fix;
          fix.anchors = refs;
          for (const Point2& r : refs) fix.distances.push_back(distance(p, r));
          record.located_position = refs.size() == 3 ? solve_trilateration_exact(fix).position
                                                     : solve_multilateration_lsq(fix).position;
        }
        g.cross_references.push_back(std::move(record));
      }
    }
  }

  const ExperimentConfig& config_;
  Rng rng_;
  Network network_;
  std::set<NodeId> on_reference_point_;
  std::set<NodeId> used_as_reference_;
};

}  // namespace

Network deploy(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  return Deployer(config, seed).run();
}

Network compromise(Network network, std::span<const NodeId> node_ids, const AttackSpec& attack,
                   Rng& rng) {
  if (!(attack.displacement_min >= 0.0 && attack.displacement_min <= attack.displacement_max)) {
    throw Error(ErrorCode::ConfigInvalid, "need 0 <= displacement_min <= displacement_max");
  }
  for (NodeId id : node_ids) network.anchor(id);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (NodeId id : node_ids) {
    AnchorNode& node = network.anchors[id];
    const double r = attack.displacement_min + (attack.displacement_max - attack.displacement_min) * unit(rng);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    node.compromised = true;
    node.advertised_position = node.true_position + Point2{r * std::cos(theta), r * std::sin(theta)};
  }
  return network;
}

Network blacklist(Network network, std::span<const NodeId> node_ids) {
  for (NodeId id : node_ids) network.anchor(id);
  network.blacklist.insert(node_ids.begin(), node_ids.end());
  for (auto& g : network.groups) {
    const auto live = std::count_if(g.members.begin(), g.members.end(),
                                    [&](NodeId m) { return !network.blacklisted(m); });
    g.usable = live >= 3;
  }
  return network;
}

}  // namespace wsnloc
