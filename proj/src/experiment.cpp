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

#include "wsnloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <mutex>
#include <thread>

namespace wsnloc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t part : {fnv1a(tag), a, b, c}) h = splitmix64(h ^ part);
  return h;
}

DetectorOptions detector_options(const ExperimentConfig& config) {
  DetectorOptions options;
  options.model_mean = config.model_mean;
  options.noise_covariance = config.noise_covariance;
  options.radio_range = config.radio_range;
  return options;
}

Meters resolve_epsilon(const ExperimentConfig& config) {
  if (config.epsilon) return *config.epsilon;
  const Network honest = deploy(config, derive_seed(config.master_seed, "epsilon-deploy"));
  Rng rng(derive_seed(config.master_seed, "epsilon-noise"));
  return estimate_epsilon(honest, config.ranging, rng);
}

TrialResult run_trial(const ExperimentConfig& config, Method method, std::uint32_t malicious_count,
                      std::uint32_t trial_index) {
  config.validate();
  if (malicious_count >= config.node_count) {
    throw Error(ErrorCode::ConfigInvalid, "malicious count must be < node_count");
  }
  const Meters epsilon = resolve_epsilon(config);

  Network network = deploy(config, derive_seed(config.master_seed, "deploy", trial_index));

  // Prefix of one shuffle per trial index: counts are nested.
  Rng attack_rng(derive_seed(config.master_seed, "attack", trial_index));
  std::vector<NodeId> order(network.anchors.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), attack_rng);
  std::vector<NodeId> chosen(order.begin(), order.begin() + malicious_count);
  network = compromise(std::move(network), chosen, {config.displacement_min, config.displacement_max}, attack_rng);

  TrialResult result;
  result.method = method;
  result.malicious_count = malicious_count;
  result.trial_index = trial_index;
  result.seed = derive_seed(config.master_seed, "detect", trial_index);
  Rng detect_rng(result.seed);
  const DetectionVerdict verdict =
      detect(method, network, config.ranging, epsilon, config.alpha, detect_rng, detector_options(config));

  std::sort(chosen.begin(), chosen.end());
  result.compromised = chosen;
  result.suspects.assign(verdict.suspects.begin(), verdict.suspects.end());
  result.error = localization_error(verdict, network);
  result.elapsed = verdict.elapsed;

  std::vector<NodeId> hits;
  std::set_intersection(result.suspects.begin(), result.suspects.end(), chosen.begin(), chosen.end(),
                        std::back_inserter(hits));
  const double tp = static_cast<double>(hits.size());
  result.precision = result.suspects.empty() ? 1.0 : tp / static_cast<double>(result.suspects.size());
  result.recall = chosen.empty() ? 1.0 : tp / static_cast<double>(chosen.size());
  return result;
}

MetricsRow aggregate(Method method, std::uint32_t malicious_count, std::span<const TrialResult> trials) {
  MetricsRow row;
  row.method = method;
  row.malicious_count = malicious_count;
  if (trials.empty()) return row;
  const double n = static_cast<double>(trials.size());
  double err = 0.0, elapsed = 0.0, precision = 0.0, recall = 0.0;
  for (const auto& t : trials) {
    err += t.error;
    elapsed += t.elapsed;
    precision += t.precision;
    recall += t.recall;
  }
  row.mean_error = err / n;
  row.mean_elapsed = elapsed / n;
  row.precision = precision / n;
  row.recall = recall / n;
  if (trials.size() > 1) {
    double ss = 0.0;
    for (const auto& t : trials) ss += (t.error - row.mean_error) * (t.error - row.mean_error);
    row.error_stddev = std::sqrt(ss / (n - 1.0));
  }
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  out.epsilon = resolve_epsilon(config);
  ExperimentConfig resolved = config;
  resolved.epsilon = out.epsilon;

  struct Task {
    Method method;
    std::uint32_t count;
    std::uint32_t index;
  };
  std::vector<Task> tasks;
  for (Method m : config.methods) {
    for (std::uint32_t count : config.malicious_counts) {
      for (std::uint32_t i = 0; i < config.trials; ++i) tasks.push_back({m, count, i});
    }
  }

  // Executed trial-index major so that drift in machine speed during a run
  // is spread evenly over methods and counts instead of tracking them.
  std::vector<std::size_t> schedule(tasks.size());
  std::iota(schedule.begin(), schedule.end(), std::size_t{0});
  std::stable_sort(schedule.begin(), schedule.end(),
                   [&](std::size_t a, std::size_t b) { return tasks[a].index < tasks[b].index; });

  out.trials.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t e = next++; e < schedule.size(); e = next++) {
      const std::size_t k = schedule[e];
      try {
        out.trials[k] = run_trial(resolved, tasks[k].method, tasks[k].count, tasks[k].index);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads == 0 ? hw : config.threads,
                                                           static_cast<unsigned>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t start = 0; start < tasks.size(); start += config.trials) {
    const std::span<const TrialResult> block(out.trials.data() + start, config.trials);
    out.rows.push_back(aggregate(tasks[start].method, tasks[start].count, block));
  }
  return out;
}

}  // namespace wsnloc
