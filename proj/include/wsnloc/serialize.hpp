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

// File formats: network and verdict JSON, metrics CSV, per-trial JSON.
// Field order is fixed so identical values serialise to identical bytes.

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wsnloc/detection.hpp"
#include "wsnloc/experiment.hpp"
#include "wsnloc/network.hpp"

namespace wsnloc {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kNetworkSchema = "wsnloc.network/1";
inline constexpr std::string_view kVerdictSchema = "wsnloc.verdict/1";
inline constexpr std::string_view kMetricsCsvHeader =
    "method,malicious_count,mean_error_m,error_stddev_m,mean_elapsed_s,precision,recall";

Json network_to_json(const Network& network);
/// Throws ConfigInvalid on schema or consistency violations.
Network network_from_json(const Json& json);

Json verdict_to_json(const DetectionVerdict& verdict);
DetectionVerdict verdict_from_json(const Json& json);

/// Header plus one row per MetricsRow; numbers with 6 significant digits.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

Json trials_to_json(const ExperimentResult& result);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& json);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

}  // namespace wsnloc
