// Copyright 2026 The dpsvt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSVT_EXPERIMENT_H_
#define DPSVT_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dpsvt/privacy_calc.h"
#include "dpsvt/stream.h"

namespace dpsvt {

enum class ExperimentMechanism {
  kAboveThresholdRestart,
  kThresholdMonitor,
  kTmeHeavyHitters,
};

const char* MechanismName(ExperimentMechanism mechanism);

struct StreamSpec {
  enum class Kind { kExample1, kConstant, kScripted };
  Kind kind = Kind::kExample1;
  std::int64_t users = 4096;
  // Constant streams only.
  std::int64_t element = 1;
  std::int64_t steps = 1;
  // Scripted streams only: line-delimited JSON stream file.
  std::string path;
  // Example-1 generator seed; derived from the master seed when absent.
  std::optional<std::uint64_t> seed;
};

// JSON form, all keys except the optional ones required:
//   {"mechanism": "tme_heavy_hitters" | "threshold_monitor" |
//                 "above_threshold_restart",
//    "epsilon": 1, "delta": 1e-6, "seed": 7,
//    "stream": {"kind": "example1", "n": 4096}
//            | {"kind": "constant", "n": 8, "element": 1, "steps": 10}
//            | {"kind": "scripted", "path": "stream.jsonl"},
//    "k": 3 | "auto", "threshold": 20, "tau_constant": 1, "beta": 0.01,
//    "trials": 50, "out": "dir", "max_restarts": 256,
//    "heavy_min_weight": 2}
struct ExperimentConfig {
  ExperimentMechanism mechanism = ExperimentMechanism::kTmeHeavyHitters;
  PrivacyBudget target{1.0, 1e-6};
  // Absent: the error target tau(k) with the constant below.
  std::optional<double> threshold;
  double tau_constant = 1.0;
  double beta = 0.01;
  // Absent: resolved as k* on the stream.
  std::optional<double> k;
  StreamSpec stream;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  // Output directory; nothing is written when empty.
  std::string out;
  // Restart budget of the baseline; defaults to the number of C-tier steps,
  // or the stream length when nothing is planted.
  std::optional<std::int64_t> max_restarts;
  // Smallest weight counted as a heavy occurrence when resolving k* and
  // scoring precision.
  double heavy_min_weight = 2.0;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view text);

struct TierRecall {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  double recall() const {
    return total == 0 ? 1.0 : static_cast<double>(hits) / total;
  }
};

struct ExperimentSummary {
  std::string mechanism;
  std::int64_t trials = 0;
  std::int64_t users = 0;
  std::int64_t steps = 0;
  std::int64_t domain_size = 0;
  double k = 0;
  bool k_auto = false;
  std::int64_t max_participation = 0;
  double threshold = 0;
  double tau = 0;

  EvolvingScales scales;
  double w_scale = 0;
  double xi = 0;
  PrivacyBudget epsilon0;

  std::int64_t max_restarts = 0;
  double baseline_instance_epsilon = 0;
  double baseline_query_scale = 0;
  double baseline_threshold_scale = 0;

  std::map<Tier, TierRecall> tiers;
  std::int64_t reports = 0;
  std::int64_t heavy_reports = 0;
  std::int64_t low_weight_reports = 0;
  std::int64_t zero_weight_reports = 0;
  std::int64_t baseline_halts = 0;
  double wall_clock_seconds = 0;

  double precision() const {
    return reports == 0 ? 1.0 : static_cast<double>(heavy_reports) / reports;
  }
};

struct ExperimentResult {
  ExperimentSummary summary;
  // Columns trial,step,element,answer,true_weight,tier; one row per planted
  // heavy element per trial.
  std::string csv;
  std::string summary_json;
};

// Builds the stream and runs the trials. Writes results.csv and summary.json
// under config.out when it is set.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

absl::StatusOr<ExperimentResult> RunExperimentOnStream(
    const ExperimentConfig& config, const UserStream& stream);

}  // namespace dpsvt

#endif  // DPSVT_EXPERIMENT_H_
