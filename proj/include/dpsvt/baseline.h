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

#ifndef DPSVT_BASELINE_H_
#define DPSVT_BASELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsvt/above_threshold.h"
#include "dpsvt/database.h"
#include "dpsvt/noise.h"
#include "dpsvt/privacy_calc.h"
#include "dpsvt/types.h"

namespace dpsvt {

struct BaselineConfig {
  PrivacyBudget target;
  double threshold = 0;
  // Number of AboveThreshold instances (equivalently Top answers) the target
  // budget is split across.
  std::int64_t max_restarts = 1;

  absl::Status Validate() const;
};

// Largest per-instance epsilon such that max_restarts pure-epsilon instances
// fit the target: the better of the even split target.epsilon / c and the
// advanced-composition inversion with delta_hat = target.delta.
absl::StatusOr<double> BaselineInstanceEpsilon(const PrivacyBudget& target,
                                               std::int64_t max_restarts);

struct BaselineLedgerEntry {
  std::int64_t instance = 0;   // 1-based
  std::int64_t opened_at = 0;  // round at which the instance took over
  double epsilon_spent = 0;    // cumulative, after opening this instance
  double delta_spent = 0;
};

// Halt-and-restart sparse vector: answers with AboveThreshold and starts a
// fresh instance after every Top until max_restarts Tops have been given.
// After that every step fails with ResourceExhaustedError.
class RestartBaseline {
 public:
  static absl::StatusOr<RestartBaseline> Create(const BaselineConfig& config,
                                                NoiseSource noise);

  absl::StatusOr<Answer> StepValue(double value);
  absl::StatusOr<Answer> Step(const Database& db, const Query& q) {
    return StepValue(q.Evaluate(db));
  }

  bool exhausted() const { return !current_.has_value(); }
  std::int64_t tops() const { return tops_; }
  double instance_epsilon() const { return instance_epsilon_; }
  double query_scale() const { return 4.0 / instance_epsilon_; }
  const std::vector<BaselineLedgerEntry>& ledger() const { return ledger_; }

 private:
  RestartBaseline(const BaselineConfig& config, double instance_epsilon)
      : config_(config), instance_epsilon_(instance_epsilon) {}

  absl::Status Open(NoiseSource noise);

  BaselineConfig config_;
  double instance_epsilon_;
  std::optional<AboveThreshold> current_;
  std::vector<BaselineLedgerEntry> ledger_;
  std::int64_t tops_ = 0;
  std::int64_t round_ = 1;
};

struct BaselineRun {
  Transcript transcript;
  // Set when the budget ran out before the queries did; the transcript then
  // ends at the last Top.
  bool halted = false;
  std::vector<BaselineLedgerEntry> ledger;
};

absl::StatusOr<BaselineRun> RunBaselineRestart(const Database& db,
                                               const BaselineConfig& config,
                                               std::span<const Query> queries,
                                               NoiseSource noise);

}  // namespace dpsvt

#endif  // DPSVT_BASELINE_H_
