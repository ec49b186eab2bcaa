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

#include "dpsvt/evolving.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsvt {

absl::Status EvolvingConfig::Validate() const {
  if (users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", users));
  }
  if (!(scale1 > 0) || !(scale2 > 0) || !std::isfinite(scale1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise scales must be positive, got ", scale1, " and ", scale2));
  }
  if (!(scale2 < scale1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "scale2 must be smaller than scale1, got ", scale2, " >= ", scale1));
  }
  if (!(budget >= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget k must be >= 1, got ", budget));
  }
  if (!std::isfinite(threshold)) {
    return absl::InvalidArgumentError("threshold must be finite");
  }
  return absl::OkStatus();
}

absl::StatusOr<ThresholdMonitorEvolving> ThresholdMonitorEvolving::Create(
    const EvolvingConfig& config, NoiseSource noise) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<LaplaceScale> w_scale =
      LaplaceScale::Create(10.0 * config.scale1);
  if (!w_scale.ok()) return w_scale.status();
  absl::StatusOr<LaplaceScale> v_scale = LaplaceScale::Create(config.scale2);
  if (!v_scale.ok()) return v_scale.status();
  return ThresholdMonitorEvolving(config, *w_scale, *v_scale, std::move(noise));
}

absl::StatusOr<Answer> ThresholdMonitorEvolving::Decide(double true_value) {
  absl::StatusOr<double> w = SampleLaplace(noise_, w_scale_);
  if (!w.ok()) return w.status();
  absl::StatusOr<double> v = SampleLaplace(noise_, v_scale_);
  if (!v.ok()) return v.status();
  const double noisy = true_value + *w + std::min(*v, config_.scale1);
  ++round_;
  return noisy < config_.threshold ? Answer::kBot : Answer::kTop;
}

absl::StatusOr<Answer> ThresholdMonitorEvolving::Step(
    std::span<const ElementId> snapshot, const Query& q) {
  if (std::ssize(snapshot) != config_.users) {
    return absl::InvalidArgumentError(
        absl::StrCat("snapshot has ", snapshot.size(), " inputs, expected ",
                     config_.users));
  }
  double sum = 0;
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    if (counters_[j] < config_.budget) sum += q.weight(snapshot[j]);
  }
  absl::StatusOr<Answer> answer = Decide(sum);
  if (!answer.ok() || *answer == Answer::kBot) return answer;
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    counters_[j] += q.weight(snapshot[j]);
  }
  return answer;
}

absl::StatusOr<Answer> ThresholdMonitorEvolving::StepPoint(
    std::span<const std::int64_t> holders) {
  double sum = 0;
  for (std::int64_t j : holders) {
    if (j < 0 || j >= config_.users) {
      return absl::InvalidArgumentError(
          absl::StrCat("user index ", j, " out of range"));
    }
    if (counters_[j] < config_.budget) sum += 1.0;
  }
  absl::StatusOr<Answer> answer = Decide(sum);
  if (!answer.ok() || *answer == Answer::kBot) return answer;
  for (std::int64_t j : holders) counters_[j] += 1.0;
  return answer;
}

}  // namespace dpsvt
