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

#ifndef DPSVT_EVENT_AUDIT_H_
#define DPSVT_EVENT_AUDIT_H_

// Classification of ThresholdMonitor rounds relative to a designated element
// x' that is not in the database, and Monte-Carlo frequencies of the events
//
//   E1: sum of f_i(x') over almost-top rounds <= 15 (k + 1) + 5 ln(1/delta)
//   E2: number of special-almost-top rounds    <= 30 (k + 1) + 10 ln(1/delta)
//   E3: E1 and E2.
//
// Round i is almost-top when a_i = Bot, c_i(x') < k and
// f_i(S_i) + w_i >= t - 2 cap; it is special-almost-top when a_i = Bot,
// c_i(x') < k and t - f_i(x') - cap <= f_i(S_i) + w_i < t - cap.
//
// Everything here reads non-private round internals.

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "dpsvt/clopper_pearson.h"
#include "dpsvt/debug_trace.h"
#include "dpsvt/interact.h"
#include "dpsvt/noise.h"
#include "dpsvt/privacy_audit.h"

namespace dpsvt {

struct EventTally {
  double almost_top_weight = 0;
  std::int64_t almost_top_count = 0;
  std::int64_t special_almost_count = 0;
  // Sum of f_i(x') over Top rounds that start with c(x') < k.
  double top_weight = 0;
};

struct EventBounds {
  double almost_top_weight = 0;
  double special_almost_count = 0;
};

EventBounds NearThresholdEventBounds(double budget, double delta);

// One instrumented round: the trace plus the designated element's query
// weight f_i(x') and its counter at the start of the round.
struct InstrumentedRound {
  RoundTrace trace;
  double extra_weight = 0;
  double extra_counter = 0;
};

struct RoundClass {
  bool almost_top = false;
  bool special_almost_top = false;
};

RoundClass ClassifyRound(const InstrumentedRound& round, double threshold,
                         double delta_cap, double budget);

EventTally TallyRounds(std::span<const InstrumentedRound> rounds,
                       double threshold, double delta_cap, double budget);

// Runs the instrumented monitor on pair.base against the adversary, tracking
// pair.extra as x'.
absl::StatusOr<EventTally> TallyEvents(const MonitorConfig& config,
                                       const NeighborPair& pair,
                                       const DeterministicAdversary& adversary,
                                       NoiseSource noise);

struct EventFrequencies {
  ProportionEstimate e1;
  ProportionEstimate e2;
  ProportionEstimate e3;
  EventBounds bounds;
  double max_almost_top_weight = 0;
  std::int64_t max_special_almost_count = 0;
};

absl::StatusOr<EventFrequencies> EstimateEventFrequencies(
    const MonitorConfig& config, const NeighborPair& pair,
    const DeterministicAdversary& adversary, std::int64_t trials,
    std::uint64_t master_seed, double confidence = 0.99);

}  // namespace dpsvt

#endif  // DPSVT_EVENT_AUDIT_H_
