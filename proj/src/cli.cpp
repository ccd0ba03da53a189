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

#include "wsnloc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wsnloc/detection.hpp"
#include "wsnloc/experiment.hpp"
#include "wsnloc/kernels.hpp"
#include "wsnloc/serialize.hpp"

namespace wsnloc::cli {

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_path;
  bool quiet = false;
};

std::vector<NodeId> parse_ids(const std::string& text) {
  std::vector<NodeId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ids.push_back(static_cast<NodeId>(v));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ConfigInvalid, "bad node id '" + item + "'");
    }
  }
  return ids;
}

std::string join_ids(const std::vector<NodeId>& ids) {
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ",";
    out += std::to_string(id);
  }
  return out.empty() ? "-" : out;
}

ExperimentConfig config_or_default(const GlobalFlags& flags) {
  return flags.config_path.empty() ? ExperimentConfig{} : load_config(flags.config_path);
}

void require_out(const GlobalFlags& flags) {
  if (flags.out_path.empty()) throw CLI::RequiredError("--out");
}

int cmd_deploy(const GlobalFlags& flags, std::ostream& out) {
  if (flags.config_path.empty()) throw CLI::RequiredError("--config");
  require_out(flags);
  const ExperimentConfig config = load_config(flags.config_path);
  const std::uint64_t seed = flags.seed.value_or(config.master_seed);
  const Network network = deploy(config, seed);
  write_text_file(flags.out_path, dump(network_to_json(network)));
  if (!flags.quiet) {
    out << "anchors " << network.anchors.size() << "\n"
        << "groups " << network.groups.size() << "\n"
        << "seed " << seed << "\n";
  }
  return kExitOk;
}

struct AttackArgs {
  std::string network_path;
  std::string ids;
  std::optional<std::uint32_t> count;
  double displacement_min = 20.0;
  double displacement_max = 60.0;
};

int cmd_attack(const GlobalFlags& flags, const AttackArgs& args, std::ostream& out) {
  require_out(flags);
  Network network = network_from_json(read_json_file(args.network_path));
  Rng rng(flags.seed.value_or(1));
  std::vector<NodeId> ids;
  if (!args.ids.empty()) {
    ids = parse_ids(args.ids);
  } else {
    const std::uint32_t count = args.count.value_or(0);
    if (count > network.anchors.size()) throw Error(ErrorCode::ConfigInvalid, "count exceeds anchor count");
    std::vector<NodeId> order(network.anchors.size());
    for (NodeId k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    ids.assign(order.begin(), order.begin() + count);
    std::sort(ids.begin(), ids.end());
  }
  network = compromise(std::move(network), ids, {args.displacement_min, args.displacement_max}, rng);
  write_text_file(flags.out_path, dump(network_to_json(network)));
  if (!flags.quiet) out << "compromised " << join_ids(ids) << "\n";
  return kExitOk;
}

struct DetectArgs {
  std::string network_path;
  std::string method;
  std::optional<std::string> ranging;
  std::optional<double> sigma;
  std::optional<double> sigma_db;
  std::optional<double> path_loss_exponent;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::string blacklist;
};

int cmd_detect(const GlobalFlags& flags, const DetectArgs& args, std::ostream& out) {
  ExperimentConfig config = config_or_default(flags);
  if (args.ranging) config.ranging.kind = parse_ranging_kind(*args.ranging);
  if (args.sigma) config.ranging.sigma = *args.sigma;
  if (args.sigma_db) config.ranging.sigma_db = *args.sigma_db;
  if (args.path_loss_exponent) config.ranging.path_loss_exponent = *args.path_loss_exponent;
  if (args.epsilon) config.epsilon = *args.epsilon;
  if (args.alpha) config.alpha = *args.alpha;
  config.validate();

  Network network = network_from_json(read_json_file(args.network_path));
  if (!args.blacklist.empty()) network = blacklist(std::move(network), parse_ids(args.blacklist));
  const Method method = parse_method(args.method);
  const std::uint64_t seed = flags.seed.value_or(config.master_seed);

  // Estimated on an honest deployment of the same config, never on the
  // (possibly attacked) input.
  const Meters epsilon = resolve_epsilon(config);
  Rng rng(seed);
  const DetectionVerdict verdict =
      detect(method, network, config.ranging, epsilon, config.alpha, rng, detector_options(config));
  if (!flags.out_path.empty()) write_text_file(flags.out_path, dump(verdict_to_json(verdict)));
  if (!flags.quiet) {
    out << "method " << to_string(method) << "\n"
        << "suspects " << verdict.suspects.size() << " ["
        << join_ids({verdict.suspects.begin(), verdict.suspects.end()}) << "]\n"
        << "localization_error_m " << localization_error(verdict, network) << "\n";
  }
  return verdict.suspects.empty() ? kExitOk : kExitSuspects;
}

int cmd_experiment(const GlobalFlags& flags, std::ostream& out) {
  if (flags.config_path.empty()) throw CLI::RequiredError("--config");
  require_out(flags);
  ExperimentConfig config = load_config(flags.config_path);
  if (flags.seed) config.master_seed = *flags.seed;
  const ExperimentResult result = run_experiment(config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(flags.out_path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create '" + flags.out_path + "': " + ec.message());
  const fs::path dir(flags.out_path);
  const std::string csv = metrics_csv(result.rows);
  write_text_file((dir / "metrics.csv").string(), csv);
  write_text_file((dir / "trials.json").string(), dump(trials_to_json(result)));

  Json manifest;
  manifest["tool"] = "wsnloc";
  manifest["version"] = kToolVersion;
  manifest["master_seed"] = config.master_seed;
  manifest["epsilon_m"] = result.epsilon;
  manifest["kernels"] = kernels::isa_name(kernels::active_isa());
  manifest["config"] = format_config(config);
  manifest["artifacts"] = {{"metrics_csv", "metrics.csv"}, {"trials_json", "trials.json"}};
  write_text_file((dir / "manifest.json").string(), dump(manifest));

  if (!flags.quiet) out << render_report(csv);
  return kExitOk;
}

}  // namespace

std::string render_report(const std::string& csv_text) {
  std::vector<std::vector<std::string>> cells;
  std::istringstream in(csv_text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    cells.push_back(std::move(row));
  }
  if (cells.empty()) throw Error(ErrorCode::ConfigInvalid, "empty CSV");
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const std::string& v = cells[r][c];
      // Text left aligned, numbers right aligned.
      const bool numeric = r > 0 && c > 0;
      const std::string pad(width[c] - v.size(), ' ');
      out << (c ? "  " : "") << (numeric ? pad + v : v + pad);
    }
    out << "\n";
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) out << (c ? "  " : "") << std::string(width[c], '-');
      out << "\n";
    }
  }
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Localization and cheating-anchor detection for wireless sensor networks", "wsnloc"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--config", flags.config_path, "Experiment config file (key = value)");
  app.add_option("--out", flags.out_path, "Output file or directory");
  app.add_flag("--quiet", flags.quiet, "Suppress the human-readable summary");

  auto* deploy_cmd = app.add_subcommand("deploy", "Deploy anchors and record trilateration memories");
  deploy_cmd->fallthrough();

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "Spoof the advertised position of anchors");
  attack_cmd->fallthrough();
  attack_cmd->add_option("--network", attack.network_path, "Network JSON")->required();
  auto* ids_opt = attack_cmd->add_option("--ids", attack.ids, "Comma-separated anchor ids");
  attack_cmd->add_option("--count", attack.count, "Number of random anchors")->excludes(ids_opt);
  attack_cmd->add_option("--displacement-min", attack.displacement_min, "Minimum spoof radius (m)");
  attack_cmd->add_option("--displacement-max", attack.displacement_max, "Maximum spoof radius (m)");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Run one detector on a network");
  detect_cmd->fallthrough();
  detect_cmd->add_option("--network", det.network_path, "Network JSON")->required();
  detect_cmd->add_option("--method", det.method, "trilateration | mahalanobis | mle")
      ->required()
      ->check(CLI::IsMember({"trilateration", "mahalanobis", "mle"}));
  detect_cmd->add_option("--ranging", det.ranging, "exact | gaussian | lognormal")
      ->check(CLI::IsMember({"exact", "gaussian", "lognormal"}));
  detect_cmd->add_option("--sigma", det.sigma, "Gaussian range sigma (m)");
  detect_cmd->add_option("--sigma-db", det.sigma_db, "Log-normal shadowing sigma (dB)");
  detect_cmd->add_option("--path-loss-exponent", det.path_loss_exponent, "Path-loss exponent");
  detect_cmd->add_option("--epsilon", det.epsilon, "Trilateration tolerance (m); estimated if omitted");
  detect_cmd->add_option("--alpha", det.alpha, "Test level for the statistical detectors");
  detect_cmd->add_option("--blacklist", det.blacklist, "Comma-separated ids to exclude");

  auto* experiment_cmd = app.add_subcommand("experiment", "Run the seeded trial protocol");
  experiment_cmd->fallthrough();

  std::string csv_path;
  auto* report_cmd = app.add_subcommand("report", "Render a metrics CSV as an aligned table");
  report_cmd->add_option("csv", csv_path, "metrics.csv")->required();

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (deploy_cmd->parsed()) return cmd_deploy(flags, out);
    if (attack_cmd->parsed()) return cmd_attack(flags, attack, out);
    if (detect_cmd->parsed()) return cmd_detect(flags, det, out);
    if (experiment_cmd->parsed()) return cmd_experiment(flags, out);
    if (report_cmd->parsed()) {
      out << render_report(read_text_file(csv_path));
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace wsnloc::cli
