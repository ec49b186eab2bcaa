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

#include "dpsvt/threshold_monitor.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpsvt/debug_trace.h"
#include "dpsvt/privacy_calc.h"

namespace dpsvt {

absl::Status MonitorConfig::Validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (!(std::log(1.0 / delta) / epsilon > 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "(1/epsilon) ln(1/delta) must exceed 1 so that the noise cap is "
        "positive; got epsilon=",
        epsilon, " delta=", delta));
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

absl::StatusOr<ThresholdMonitor> ThresholdMonitor::Create(
    Database db, const MonitorConfig& config, NoiseSource noise) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<double> cap = DeltaCap(config.epsilon, config.delta);
  if (!cap.ok()) return cap.status();
  absl::StatusOr<LaplaceScale> w_scale = LaplaceScale::Create(10.0 * *cap);
  if (!w_scale.ok()) return w_scale.status();
  absl::StatusOr<LaplaceScale> v_scale =
      LaplaceScale::Create(std::log(1.0 / config.delta) / config.epsilon);
  if (!v_scale.ok()) return v_scale.status();
  return ThresholdMonitor(std::move(db), config, *cap, *w_scale, *v_scale,
                          std::move(noise));
}

double ThresholdMonitor::counter(ElementId x) const {
  auto it = counters_.find(x);
  return it == counters_.end() ? 0.0 : it->second;
}

absl::StatusOr<Answer> ThresholdMonitor::Step(const Query& q) {
  return StepImpl(q, nullptr);
}

absl::StatusOr<Answer> ThresholdMonitor::StepImpl(const Query& q,
                                                  RoundTrace* trace) {
  // Draw order is part of the contract: w first, then v.
  absl::StatusOr<double> w = SampleLaplace(noise_, w_scale_);
  if (!w.ok()) return w.status();
  absl::StatusOr<double> v = SampleLaplace(noise_, v_scale_);
  if (!v.ok()) return v.status();
  const double v_capped = std::min(*v, delta_cap_);

  const double true_value = q.Evaluate(live_);
  const double noisy_value = true_value + *w + v_capped;
  const Answer answer =
      noisy_value < config_.threshold ? Answer::kBot : Answer::kTop;

  if (answer == Answer::kTop) {
    for (const auto& [x, weight] : q.weights()) {
      if (weight <= 0) continue;
      double& c = counters_[x];
      c += weight;
      if (c >= config_.budget) live_.RemoveAll(x);
    }
  }
  if (trace != nullptr) {
    *trace = RoundTrace{.round = round_,
                        .true_value = true_value,
                        .w = *w,
                        .v = *v,
                        .v_capped = v_capped,
                        .noisy_value = noisy_value,
                        .answer = answer};
  }
  ++round_;
  return answer;
}

absl::StatusOr<Transcript> RunThresholdMonitor(Database db,
                                               const MonitorConfig& config,
                                               std::span<const Query> queries,
                                               NoiseSource noise) {
  absl::StatusOr<ThresholdMonitor> monitor =
      ThresholdMonitor::Create(std::move(db), config, std::move(noise));
  if (!monitor.ok()) return monitor.status();
  Transcript transcript;
  transcript.reserve(queries.size());
  for (const Query& q : queries) {
    absl::StatusOr<Answer> a = monitor->Step(q);
    if (!a.ok()) return a.status();
    transcript.push_back(*a);
  }
  return transcript;
}

absl::StatusOr<TracingThresholdMonitor> TracingThresholdMonitor::Create(
    Database db, const MonitorConfig& config, NoiseSource noise) {
  absl::StatusOr<ThresholdMonitor> monitor =
      ThresholdMonitor::Create(std::move(db), config, std::move(noise));
  if (!monitor.ok()) return monitor.status();
  return TracingThresholdMonitor(*std::move(monitor));
}

absl::StatusOr<RoundTrace> TracingThresholdMonitor::Step(const Query& q) {
  RoundTrace trace;
  absl::StatusOr<Answer> a = monitor_.StepImpl(q, &trace);
  if (!a.ok()) return a.status();
  return trace;
}

}  // namespace dpsvt
