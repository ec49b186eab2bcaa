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

#include "dpsvt/above_threshold.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpsvt {

absl::StatusOr<AboveThreshold> AboveThreshold::Create(Database db,
                                                      double epsilon,
                                                      double threshold,
                                                      NoiseSource noise) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  absl::StatusOr<LaplaceScale> threshold_scale =
      LaplaceScale::Create(2.0 / epsilon);
  if (!threshold_scale.ok()) return threshold_scale.status();
  absl::StatusOr<LaplaceScale> query_scale = LaplaceScale::Create(4.0 / epsilon);
  if (!query_scale.ok()) return query_scale.status();

  absl::StatusOr<double> threshold_noise =
      SampleLaplace(noise, *threshold_scale);
  if (!threshold_noise.ok()) return threshold_noise.status();
  return AboveThreshold(std::move(db), epsilon, threshold + *threshold_noise,
                        *query_scale, std::move(noise));
}

absl::StatusOr<Answer> AboveThreshold::Step(const Query& q) {
  return StepValue(q.Evaluate(db_));
}

absl::StatusOr<Answer> AboveThreshold::StepValue(double value) {
  if (halted_) {
    return absl::FailedPreconditionError(
        "AboveThreshold already answered Top and halted");
  }
  absl::StatusOr<double> noise = SampleLaplace(noise_, query_scale_);
  if (!noise.ok()) return noise.status();
  if (value + *noise >= noisy_threshold_) {
    halted_ = true;
    return Answer::kTop;
  }
  return Answer::kBot;
}

}  // namespace dpsvt
