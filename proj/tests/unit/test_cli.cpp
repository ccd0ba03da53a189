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

#include <chrono>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "wsnloc/cli.hpp"
#include "wsnloc/config.hpp"
#include "wsnloc/network.hpp"
#include "wsnloc/serialize.hpp"

using namespace wsnloc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::initializer_list<std::string> args) {
  std::vector<std::string> argv{"wsnloc"};
  argv.insert(argv.end(), args);
  std::ostringstream out, err;
  Outcome r;
  r.code = cli::run(argv, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wsnloc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const ExperimentConfig& config) {
  const std::string path = (dir / "run.cfg").string();
  write_text_file(path, format_config(config));
  return path;
}

std::string drop_timing_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c != 4) out += cells[c] + ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("usage errors exit 64") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"deploy"}).code == cli::kExitUsage);
  CHECK(run({"detect", "--network", "x.json", "--method", "voting"}).code == cli::kExitUsage);
  CHECK(run({"attack", "--network", "x.json", "--ids", "1", "--count", "2", "--out", "y"}).code ==
        cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("deploy a minimal network") {
  const fs::path dir = scratch("deploy_min");
  ExperimentConfig c;
  c.node_count = 3;
  c.malicious_counts = {0};
  const std::string cfg = write_config(dir, c);
  const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  const Outcome r = run({"deploy", "--config", cfg, "--out", a, "--seed", "5"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("groups 1\n") != std::string::npos);
  CHECK(r.out.find("seed 5\n") != std::string::npos);
  CHECK(run({"--seed", "5", "deploy", "--config", cfg, "--out", b, "--quiet"}).code == cli::kExitOk);
  CHECK(read_text_file(a) == read_text_file(b));
  CHECK(network_from_json(read_json_file(a)).groups.size() == 1);
}

TEST_CASE("deploy the default configuration") {
  const fs::path dir = scratch("deploy_default");
  const std::string cfg = write_config(dir, ExperimentConfig{});
  const Outcome r = run({"deploy", "--config", cfg, "--out", (dir / "net.json").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("anchors 117\n") != std::string::npos);
  CHECK(r.out.find("groups 39\n") != std::string::npos);
}

TEST_CASE("attack by count and by id list") {
  const fs::path dir = scratch("attack");
  const std::string cfg = write_config(dir, ExperimentConfig{});
  const std::string net = (dir / "net.json").string();
  REQUIRE(run({"deploy", "--config", cfg, "--out", net, "--quiet"}).code == cli::kExitOk);

  const std::string none = (dir / "none.json").string();
  CHECK(run({"attack", "--network", net, "--count", "0", "--out", none}).code == cli::kExitOk);
  CHECK(network_from_json(read_json_file(none)) == network_from_json(read_json_file(net)));

  const std::string listed = (dir / "listed.json").string();
  const Outcome r = run({"attack", "--network", net, "--ids", "3,17,40", "--out", listed});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "compromised 3,17,40\n");
  const Network attacked = network_from_json(read_json_file(listed));
  for (const AnchorNode& a : attacked.anchors) {
    const bool expected = a.id == 3 || a.id == 17 || a.id == 40;
    CHECK(a.compromised == expected);
    CHECK((a.advertised_position != a.true_position) == expected);
  }

  const std::string r1 = (dir / "r1.json").string(), r2 = (dir / "r2.json").string();
  const std::string r3 = (dir / "r3.json").string();
  const Outcome first = run({"attack", "--network", net, "--count", "5", "--seed", "9", "--out", r1});
  const Outcome second = run({"attack", "--network", net, "--count", "5", "--seed", "9", "--out", r2});
  const Outcome other = run({"attack", "--network", net, "--count", "5", "--seed", "10", "--out", r3});
  CHECK(first.out == second.out);
  CHECK(read_text_file(r1) == read_text_file(r2));
  CHECK(first.out != other.out);
  std::size_t count = 0;
  for (const AnchorNode& a : network_from_json(read_json_file(r1)).anchors) count += a.compromised;
  CHECK(count == 5);

  CHECK(run({"attack", "--network", net, "--ids", "500", "--out", r3}).code == cli::kExitData);
  CHECK(run({"attack", "--network", (dir / "missing.json").string(), "--count", "1", "--out", r3}).code ==
        cli::kExitData);
}

TEST_CASE("detect exit status follows the verdict") {
  const fs::path dir = scratch("detect");
  const std::string cfg = write_config(dir, ExperimentConfig{});
  const std::string net = (dir / "net.json").string(), spoofed = (dir / "spoofed.json").string();
  REQUIRE(run({"deploy", "--config", cfg, "--out", net, "--quiet"}).code == cli::kExitOk);
  REQUIRE(run({"attack", "--network", net, "--ids", "21", "--displacement-min", "50", "--displacement-max", "50",
               "--out", spoofed, "--quiet"})
              .code == cli::kExitOk);

  for (const char* method : {"trilateration", "mahalanobis", "mle"}) {
    CAPTURE(method);
    const Outcome honest = run({"detect", "--network", net, "--method", method, "--ranging", "exact",
                                "--epsilon", "1"});
    CHECK(honest.code == cli::kExitOk);
    CHECK(honest.out.find("suspects 0 [-]\n") != std::string::npos);

    const std::string verdict = (dir / (std::string(method) + ".json")).string();
    const Outcome caught = run({"detect", "--network", spoofed, "--method", method, "--ranging", "exact",
                                "--epsilon", "1", "--out", verdict});
    CHECK(caught.code == cli::kExitSuspects);
    CHECK(caught.out.find("suspects 1 [21]\n") != std::string::npos);
    const DetectionVerdict v = verdict_from_json(read_json_file(verdict));
    CHECK(v.suspects == std::set<NodeId>{21});
    CHECK(v.method == parse_method(method));
  }

  // Excluding the liar leaves an honest network.
  CHECK(run({"detect", "--network", spoofed, "--method", "trilateration", "--ranging", "exact", "--epsilon", "1",
             "--blacklist", "21", "--quiet"})
            .code == cli::kExitOk);
  CHECK(run({"detect", "--network", net, "--method", "trilateration", "--epsilon", "0"}).code == cli::kExitData);
  CHECK(run({"detect", "--network", (dir / "nope.json").string(), "--method", "mle"}).code == cli::kExitData);
}

TEST_CASE("experiment writes CSV, trial JSON and manifest reproducibly") {
  const fs::path dir = scratch("experiment");
  ExperimentConfig c;
  c.trials = 1;
  const std::string cfg = write_config(dir, c);
  const auto start = std::chrono::steady_clock::now();
  const Outcome r = run({"experiment", "--config", cfg, "--out", (dir / "a").string(), "--quiet"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.code == cli::kExitOk);
  CHECK(seconds < 10.0);

  const std::string csv = read_text_file((dir / "a" / "metrics.csv").string());
  CHECK(parse_metrics_csv(csv).size() == 12);
  CHECK(read_json_file((dir / "a" / "trials.json").string())["trials"].size() == 12);
  const Json manifest = read_json_file((dir / "a" / "manifest.json").string());
  CHECK(manifest["master_seed"].get<std::uint64_t>() == c.master_seed);
  CHECK(manifest["version"].get<std::string>() == cli::kToolVersion);
  CHECK(format_config(parse_config(manifest["config"].get<std::string>())) == format_config(c));

  // The manifest's config alone reproduces the run.
  const fs::path replay_cfg = dir / "replay.cfg";
  write_text_file(replay_cfg.string(), manifest["config"].get<std::string>());
  REQUIRE(run({"experiment", "--config", replay_cfg.string(), "--out", (dir / "b").string(), "--quiet"}).code ==
          cli::kExitOk);
  CHECK(drop_timing_column(read_text_file((dir / "b" / "metrics.csv").string())) == drop_timing_column(csv));

  CHECK(run({"experiment", "--config", (dir / "missing.cfg").string(), "--out", (dir / "c").string()}).code ==
        cli::kExitData);
  write_text_file((dir / "typo.cfg").string(), "trails = 3\n");
  CHECK(run({"experiment", "--config", (dir / "typo.cfg").string(), "--out", (dir / "c").string()}).code ==
        cli::kExitData);
}

TEST_CASE("report renders an aligned table") {
  const fs::path dir = scratch("report");
  const std::string csv_path = (dir / "m.csv").string();
  write_text_file(csv_path,
                  "method,malicious_count,mean_error_m,error_stddev_m,mean_elapsed_s,precision,recall\n"
                  "trilateration,5,1.5,0.25,0.004,1,0.96\n"
                  "mle,20,0.693,0.1,0.0091,0.55,1\n");
  const Outcome r = run({"report", csv_path});
  CHECK(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  for (const auto& line : lines) CHECK(line.size() == lines[0].size());
  CHECK(lines[0].rfind("method", 0) == 0);
  CHECK(lines[1].find_first_not_of("- ") == std::string::npos);
  CHECK(lines[3].rfind("mle  ", 0) == 0);
  // Numbers are right aligned: the last column ends flush.
  CHECK(lines[2].back() == '6');
  CHECK(lines[3].back() == '1');
  CHECK(run({"report", (dir / "absent.csv").string()}).code == cli::kExitData);
}
