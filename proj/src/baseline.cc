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

#include "dpsvt/baseline.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsvt {
namespace {

// Cumulative spend of `instances` pure-epsilon instances.
PrivacyBudget Spend(double epsilon, std::int64_t instances,
                    const PrivacyBudget& target) {
  const double basic = static_cast<double>(instances) * epsilon;
  absl::StatusOr<PrivacyBudget> advanced =
      AdvancedComposition(epsilon, 0.0, instances, target.delta);
  if (advanced.ok() && advanced->epsilon < basic) return *advanced;
  return PrivacyBudget{basic, 0.0};
}

}  // namespace

absl::Status BaselineConfig::Validate() const {
  if (!(target.epsilon > 0) || !std::isfinite(target.epsilon) ||
      !(target.delta > 0 && target.delta < 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad target (", target.epsilon, ", ", target.delta, ")"));
  }
  if (max_restarts < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("max_restarts must be >= 1, got ", max_restarts));
  }
  if (!std::isfinite(threshold)) {
    return absl::InvalidArgumentError("threshold must be finite");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> BaselineInstanceEpsilon(const PrivacyBudget& target,
                                               std::int64_t max_restarts) {
  BaselineConfig probe{.target = target, .max_restarts = max_restarts};
  if (absl::Status s = probe.Validate(); !s.ok()) return s;
  const double even = target.epsilon / static_cast<double>(max_restarts);
  auto fits = [&](double e) {
    absl::StatusOr<PrivacyBudget> b =
        AdvancedComposition(e, 0.0, max_restarts, target.delta);
    return b.ok() && b->epsilon <= target.epsilon;
  };
  double lo = 0;
  double hi = target.epsilon;
  if (fits(hi)) return std::max(even, hi);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return std::max(even, lo);
}

absl::StatusOr<RestartBaseline> RestartBaseline::Create(
    const BaselineConfig& config, NoiseSource noise) {
  absl::StatusOr<double> e =
      BaselineInstanceEpsilon(config.target, config.max_restarts);
  if (!e.ok()) return e.status();
  RestartBaseline baseline(config, *e);
  if (absl::Status s = baseline.Open(std::move(noise)); !s.ok()) return s;
  return baseline;
}

absl::Status RestartBaseline::Open(NoiseSource noise) {
  absl::StatusOr<AboveThreshold> instance = AboveThreshold::Create(
      Database(), instance_epsilon_, config_.threshold, std::move(noise));
  if (!instance.ok()) return instance.status();
  current_.emplace(*std::move(instance));
  const std::int64_t opened = std::ssize(ledger_) + 1;
  const PrivacyBudget spent = Spend(instance_epsilon_, opened, config_.target);
  ledger_.push_back(BaselineLedgerEntry{.instance = opened,
                                        .opened_at = round_,
                                        .epsilon_spent = spent.epsilon,
                                        .delta_spent = spent.delta});
  return absl::OkStatus();
}

absl::StatusOr<Answer> RestartBaseline::StepValue(double value) {
  if (!current_.has_value()) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "restart budget of ", config_.max_restarts, " Tops is spent"));
  }
  absl::StatusOr<Answer> answer = current_->StepValue(value);
  if (!answer.ok()) return answer;
  ++round_;
  if (*answer == Answer::kTop) {
    ++tops_;
    NoiseSource noise = std::move(*current_).ReleaseNoise();
    current_.reset();
    if (tops_ < config_.max_restarts) {
      if (absl::Status s = Open(std::move(noise)); !s.ok()) return s;
    }
  }
  return answer;
}

absl::StatusOr<BaselineRun> RunBaselineRestart(const Database& db,
                                               const BaselineConfig& config,
                                               std::span<const Query> queries,
                                               NoiseSource noise) {
  absl::StatusOr<RestartBaseline> baseline =
      RestartBaseline::Create(config, std::move(noise));
  if (!baseline.ok()) return baseline.status();
  BaselineRun run;
  for (const Query& q : queries) {
    if (baseline->exhausted()) {
      run.halted = true;
      break;
    }
    absl::StatusOr<Answer> a = baseline->Step(db, q);
    if (!a.ok()) return a.status();
    run.transcript.push_back(*a);
  }
  run.ledger = baseline->ledger();
  return run;
}

}  // namespace dpsvt
