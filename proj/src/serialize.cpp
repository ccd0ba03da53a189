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

#include "wsnloc/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wsnloc {

namespace {

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

Point2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigInvalid, "point must be [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Json network_to_json(const Network& network) {
  Json out;
  out["schema"] = kNetworkSchema;
  out["area"] = {{"width", network.width}, {"height", network.height}};
  out["rng_seed"] = network.rng_seed;
  Json anchors = Json::array();
  for (const auto& a : network.anchors) {
    anchors.push_back({{"id", a.id},
                       {"true_position", point_json(a.true_position)},
                       {"advertised_position", point_json(a.advertised_position)},
                       {"group_ids", a.group_ids},
                       {"compromised", a.compromised}});
  }
  out["anchors"] = std::move(anchors);
  Json groups = Json::array();
  for (const auto& g : network.groups) {
    Json cross = Json::array();
    for (const auto& c : g.cross_references) {
      cross.push_back({{"member", c.member},
                       {"groups", c.groups},
                       {"distances", c.distances},
                       {"located_position", point_json(c.located_position)}});
    }
    groups.push_back({{"id", g.id},
                      {"members", g.members},
                      {"reference_point", point_json(g.reference_point)},
                      {"m1",
                       {{"trilaterated_point", point_json(g.m1.trilaterated_point)},
                        {"member_distances", g.m1.member_distances}}},
                      {"neighbours", g.neighbours},
                      {"cross_references", std::move(cross)},
                      {"usable", g.usable}});
  }
  out["groups"] = std::move(groups);
  out["blacklist"] = Json(std::vector<NodeId>(network.blacklist.begin(), network.blacklist.end()));
  return out;
}

Network network_from_json(const Json& json) {
  try {
    if (json.at("schema").get<std::string>() != kNetworkSchema) invalid("unsupported network schema");
    Network net;
    net.width = json.at("area").at("width").get<double>();
    net.height = json.at("area").at("height").get<double>();
    net.rng_seed = json.at("rng_seed").get<std::uint64_t>();
    for (const auto& a : json.at("anchors")) {
      AnchorNode node;
      node.id = a.at("id").get<NodeId>();
      node.true_position = point_from(a.at("true_position"));
      node.advertised_position = point_from(a.at("advertised_position"));
      node.group_ids = a.at("group_ids").get<std::vector<GroupId>>();
      node.compromised = a.at("compromised").get<bool>();
      if (node.id != net.anchors.size()) invalid("anchor ids must be 0..n-1 in order");
      if (!node.compromised && !(node.advertised_position == node.true_position)) {
        invalid("honest anchor " + std::to_string(node.id) + " advertises a false position");
      }
      net.anchors.push_back(std::move(node));
    }
    for (const auto& g : json.at("groups")) {
      TrilaterationGroup group;
      group.id = g.at("id").get<GroupId>();
      group.members = g.at("members").get<std::vector<NodeId>>();
      group.reference_point = point_from(g.at("reference_point"));
      group.m1.trilaterated_point = point_from(g.at("m1").at("trilaterated_point"));
      group.m1.member_distances = g.at("m1").at("member_distances").get<std::vector<double>>();
      group.neighbours = g.at("neighbours").get<std::vector<GroupId>>();
      for (const auto& c : g.at("cross_references")) {
        CrossReference record;
        record.member = c.at("member").get<NodeId>();
        record.groups = c.at("groups").get<std::vector<GroupId>>();
        record.distances = c.at("distances").get<std::vector<double>>();
        record.located_position = point_from(c.at("located_position"));
        group.cross_references.push_back(std::move(record));
      }
      group.usable = g.at("usable").get<bool>();
      if (group.id != net.groups.size()) invalid("group ids must be 0..m-1 in order");
      if (group.members.size() < 3) invalid("group " + std::to_string(group.id) + " has fewer than 3 members");
      if (group.m1.member_distances.size() != group.members.size() ||
          group.cross_references.size() != group.members.size()) {
        invalid("group " + std::to_string(group.id) + " records are not aligned with its members");
      }
      for (NodeId m : group.members) {
        if (m >= net.anchors.size()) invalid("group member " + std::to_string(m) + " does not exist");
      }
      net.groups.push_back(std::move(group));
    }
    for (const auto& g : net.groups) {
      for (GroupId h : g.neighbours) {
        if (h >= net.groups.size() || h == g.id) invalid("bad neighbour reference in group " + std::to_string(g.id));
      }
      for (const auto& c : g.cross_references) {
        for (GroupId h : c.groups) {
          if (std::find(g.neighbours.begin(), g.neighbours.end(), h) == g.neighbours.end()) {
            invalid("cross reference to a non-neighbour group in group " + std::to_string(g.id));
          }
        }
      }
    }
    for (NodeId id : json.at("blacklist").get<std::vector<NodeId>>()) {
      if (id >= net.anchors.size()) invalid("blacklisted id does not exist");
      net.blacklist.insert(id);
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed network JSON: ") + e.what());
  }
}

Json verdict_to_json(const DetectionVerdict& verdict) {
  Json out;
  out["schema"] = kVerdictSchema;
  out["method"] = to_string(verdict.method);
  out["suspects"] = Json(std::vector<NodeId>(verdict.suspects.begin(), verdict.suspects.end()));
  Json scores = Json::array();
  for (const auto& [id, s] : verdict.scores) scores.push_back({{"id", id}, {"score", s}});
  out["scores"] = std::move(scores);
  Json positions = Json::array();
  for (const auto& [id, p] : verdict.estimated_positions) {
    positions.push_back({{"id", id}, {"position", point_json(p)}});
  }
  out["estimated_positions"] = std::move(positions);
  out["elapsed_s"] = verdict.elapsed;
  return out;
}

DetectionVerdict verdict_from_json(const Json& json) {
  try {
    if (json.at("schema").get<std::string>() != kVerdictSchema) invalid("unsupported verdict schema");
    DetectionVerdict v;
    v.method = parse_method(json.at("method").get<std::string>());
    for (NodeId id : json.at("suspects").get<std::vector<NodeId>>()) v.suspects.insert(id);
    for (const auto& s : json.at("scores")) v.scores[s.at("id").get<NodeId>()] = s.at("score").get<double>();
    for (const auto& p : json.at("estimated_positions")) {
      v.estimated_positions[p.at("id").get<NodeId>()] = point_from(p.at("position"));
    }
    v.elapsed = json.at("elapsed_s").get<double>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed verdict JSON: ") + e.what());
  }
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsCsvHeader);
  out += "\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.method)) + "," + std::to_string(r.malicious_count) + "," + g6(r.mean_error) +
           "," + g6(r.error_stddev) + "," + g6(r.mean_elapsed) + "," + g6(r.precision) + "," + g6(r.recall) + "\n";
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) invalid("metrics CSV header mismatch");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) invalid("metrics CSV row must have 7 cells: " + line);
    try {
      MetricsRow r;
      r.method = parse_method(cells[0]);
      r.malicious_count = static_cast<std::uint32_t>(std::stoul(cells[1]));
      r.mean_error = std::stod(cells[2]);
      r.error_stddev = std::stod(cells[3]);
      r.mean_elapsed = std::stod(cells[4]);
      r.precision = std::stod(cells[5]);
      r.recall = std::stod(cells[6]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      invalid("bad number in metrics CSV row: " + line);
    }
  }
  return rows;
}

Json trials_to_json(const ExperimentResult& result) {
  Json out;
  out["epsilon_m"] = result.epsilon;
  Json trials = Json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"method", to_string(t.method)},
                      {"malicious_count", t.malicious_count},
                      {"trial_index", t.trial_index},
                      {"seed", t.seed},
                      {"error_m", t.error},
                      {"precision", t.precision},
                      {"recall", t.recall},
                      {"elapsed_s", t.elapsed},
                      {"compromised", t.compromised},
                      {"suspects", t.suspects}});
  }
  out["trials"] = std::move(trials);
  return out;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for '" + path + "'");
}

}  // namespace wsnloc
