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

#ifndef DPSVT_DEBUG_TRACE_H_
#define DPSVT_DEBUG_TRACE_H_

// Non-private instrumentation. Nothing in this header may feed a released
// transcript; it exists for audits and for the CLI's --debug-trace flag.

#include <cstdint>

#include "absl/status/statusor.h"
#include "dpsvt/threshold_monitor.h"

namespace dpsvt {

struct RoundTrace {
  std::int64_t round = 0;
  // f_i(S_i) on the live database before the round.
  double true_value = 0;
  double w = 0;
  double v = 0;
  double v_capped = 0;
  double noisy_value = 0;
  Answer answer = Answer::kBot;
};

// ThresholdMonitor that also reports the internals of every round. Produces
// the same answers as the plain monitor under the same noise.
class TracingThresholdMonitor {
 public:
  static absl::StatusOr<TracingThresholdMonitor> Create(
      Database db, const MonitorConfig& config, NoiseSource noise);

  absl::StatusOr<RoundTrace> Step(const Query& q);

  const ThresholdMonitor& monitor() const { return monitor_; }

 private:
  explicit TracingThresholdMonitor(ThresholdMonitor monitor)
      : monitor_(std::move(monitor)) {}

  ThresholdMonitor monitor_;
};

}  // namespace dpsvt

#endif  // DPSVT_DEBUG_TRACE_H_
