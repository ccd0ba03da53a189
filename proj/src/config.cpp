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

#include "wsnloc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wsnloc {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Trilateration: return "trilateration";
    case Method::Mahalanobis: return "mahalanobis";
    case Method::Mle: return "mle";
  }
  return "unknown";
}

std::string_view to_string(RangingKind kind) {
  switch (kind) {
    case RangingKind::Exact: return "exact";
    case RangingKind::Gaussian: return "gaussian";
    case RangingKind::LogNormal: return "lognormal";
  }
  return "unknown";
}

std::string_view to_string(ModelMean mean) {
  return mean == ModelMean::PerAnchor ? "per_anchor" : "centroid";
}

std::string_view to_string(NoiseCovariance covariance) {
  return covariance == NoiseCovariance::Propagated ? "propagated" : "identity";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Trilateration, Method::Mahalanobis, Method::Mle}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown method '" + std::string(name) + "'");
}

RangingKind parse_ranging_kind(std::string_view name) {
  for (RangingKind k : {RangingKind::Exact, RangingKind::Gaussian, RangingKind::LogNormal}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown ranging model '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (!(area_width > 0.0 && area_height > 0.0) || !std::isfinite(area_width) || !std::isfinite(area_height)) {
    fail("area must be positive");
  }
  if (node_count < 3) fail("node_count must be >= 3");
  if (trials < 1) fail("trials must be >= 1");
  for (auto count : malicious_counts) {
    if (count >= node_count) fail("every malicious count must be < node_count");
  }
  if (!(displacement_min >= 0.0 && displacement_min <= displacement_max)) {
    fail("need 0 <= displacement_min <= displacement_max");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0, 1)");
  if (epsilon && !(*epsilon > 0.0)) fail("epsilon must be > 0");
  if (ranging.kind == RangingKind::Gaussian && !(ranging.sigma >= 0.0)) fail("sigma must be >= 0");
  if (ranging.kind == RangingKind::LogNormal &&
      !(ranging.sigma_db >= 0.0 && ranging.path_loss_exponent > 0.0)) {
    fail("lognormal needs sigma_db >= 0 and path_loss_exponent > 0");
  }
  if (methods.empty()) fail("methods must not be empty");
  if (!(group_radius > min_separation && min_separation > 0.0)) {
    fail("need group_radius > min_separation > 0");
  }
  if (2.0 * group_radius >= std::min(area_width, area_height)) fail("group_radius too large for the area");
  if (!(min_fix_area > 0.0)) fail("min_fix_area must be > 0");
  if (neighbour_count < 2) fail("neighbour_count must be >= 2");
  if (!(radio_range > 0.0)) fail("radio_range must be > 0");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw Error(ErrorCode::ConfigInvalid, key + ": not a number: '" + value + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ConfigInvalid, key + ": not an unsigned integer: '" + value + "'");
  }
  return out;
}

std::uint32_t to_u32(const std::string& key, const std::string& value) {
  const std::uint64_t v = to_u64(key, value);
  if (v > 0xffffffffULL) throw Error(ErrorCode::ConfigInvalid, key + ": out of range");
  return static_cast<std::uint32_t>(v);
}

// Shortest text that round-trips the double.
std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"area_width", [](auto& c, auto& k, auto& v) { c.area_width = to_double(k, v); }},
      {"area_height", [](auto& c, auto& k, auto& v) { c.area_height = to_double(k, v); }},
      {"node_count", [](auto& c, auto& k, auto& v) { c.node_count = to_u32(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = to_u32(k, v); }},
      {"malicious_counts",
       [](auto& c, auto& k, auto& v) {
         c.malicious_counts.clear();
         for (const auto& item : split_list(v)) c.malicious_counts.push_back(to_u32(k, item));
       }},
      {"ranging", [](auto& c, auto&, auto& v) { c.ranging.kind = parse_ranging_kind(v); }},
      {"sigma", [](auto& c, auto& k, auto& v) { c.ranging.sigma = to_double(k, v); }},
      {"sigma_db", [](auto& c, auto& k, auto& v) { c.ranging.sigma_db = to_double(k, v); }},
      {"path_loss_exponent",
       [](auto& c, auto& k, auto& v) { c.ranging.path_loss_exponent = to_double(k, v); }},
      {"epsilon",
       [](auto& c, auto& k, auto& v) {
         if (v == "auto") {
           c.epsilon.reset();
         } else {
           c.epsilon = to_double(k, v);
         }
       }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"displacement_min", [](auto& c, auto& k, auto& v) { c.displacement_min = to_double(k, v); }},
      {"displacement_max", [](auto& c, auto& k, auto& v) { c.displacement_max = to_double(k, v); }},
      {"master_seed", [](auto& c, auto& k, auto& v) { c.master_seed = to_u64(k, v); }},
      {"methods",
       [](auto& c, auto&, auto& v) {
         c.methods.clear();
         for (const auto& item : split_list(v)) c.methods.push_back(parse_method(item));
       }},
      {"group_radius", [](auto& c, auto& k, auto& v) { c.group_radius = to_double(k, v); }},
      {"min_separation", [](auto& c, auto& k, auto& v) { c.min_separation = to_double(k, v); }},
      {"min_fix_area", [](auto& c, auto& k, auto& v) { c.min_fix_area = to_double(k, v); }},
      {"neighbour_count", [](auto& c, auto& k, auto& v) { c.neighbour_count = to_u32(k, v); }},
      {"radio_range", [](auto& c, auto& k, auto& v) { c.radio_range = to_double(k, v); }},
      {"model_mean",
       [](auto& c, auto& k, auto& v) {
         if (v == "per_anchor") {
           c.model_mean = ModelMean::PerAnchor;
         } else if (v == "centroid") {
           c.model_mean = ModelMean::GroupCentroid;
         } else {
           throw Error(ErrorCode::ConfigInvalid, k + ": expected per_anchor or centroid");
         }
       }},
      {"noise_covariance",
       [](auto& c, auto& k, auto& v) {
         if (v == "propagated") {
           c.noise_covariance = NoiseCovariance::Propagated;
         } else if (v == "identity") {
           c.noise_covariance = NoiseCovariance::Identity;
         } else {
           throw Error(ErrorCode::ConfigInvalid, k + ": expected propagated or identity");
         }
       }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = to_u32(k, v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (seen[key]++ > 0) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& c) {
  auto join = [](const auto& items, auto&& each) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += ",";
      out += each(item);
    }
    return out;
  };
  std::ostringstream out;
  out << "area_width = " << fmt_double(c.area_width) << "\n"
      << "area_height = " << fmt_double(c.area_height) << "\n"
      << "node_count = " << c.node_count << "\n"
      << "trials = " << c.trials << "\n"
      << "malicious_counts = " << join(c.malicious_counts, [](auto v) { return std::to_string(v); }) << "\n"
      << "ranging = " << to_string(c.ranging.kind) << "\n"
      << "sigma = " << fmt_double(c.ranging.sigma) << "\n"
      << "sigma_db = " << fmt_double(c.ranging.sigma_db) << "\n"
      << "path_loss_exponent = " << fmt_double(c.ranging.path_loss_exponent) << "\n"
      << "epsilon = " << (c.epsilon ? fmt_double(*c.epsilon) : std::string("auto")) << "\n"
      << "alpha = " << fmt_double(c.alpha) << "\n"
      << "displacement_min = " << fmt_double(c.displacement_min) << "\n"
      << "displacement_max = " << fmt_double(c.displacement_max) << "\n"
      << "master_seed = " << c.master_seed << "\n"
      << "methods = " << join(c.methods, [](Method m) { return std::string(to_string(m)); }) << "\n"
      << "group_radius = " << fmt_double(c.group_radius) << "\n"
      << "min_separation = " << fmt_double(c.min_separation) << "\n"
      << "min_fix_area = " << fmt_double(c.min_fix_area) << "\n"
      << "neighbour_count = " << c.neighbour_count << "\n"
      << "radio_range = " << fmt_double(c.radio_range) << "\n"
      << "model_mean = " << to_string(c.model_mean) << "\n"
      << "noise_covariance = " << to_string(c.noise_covariance) << "\n"
      << "threads = " << c.threads << "\n";
  return out.str();
}

}  // namespace wsnloc
