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

#ifndef DPSVT_PRIVACY_AUDIT_H_
#define DPSVT_PRIVACY_AUDIT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsvt/clopper_pearson.h"
#include "dpsvt/database.h"
#include "dpsvt/interact.h"
#include "dpsvt/types.h"

namespace dpsvt {

// Neighboring databases S and S' = S + {extra}.
struct NeighborPair {
  Database base;
  ElementId extra{};

  Database Neighbor() const;
};

struct TranscriptEvent {
  std::string name;
  std::function<bool(std::span<const Answer>)> holds;
};

// {first Top at round <= r} for r in [1, rounds], {at least c Tops} for c in
// [1, rounds], and {transcript starts with p} for every answer prefix p of
// length at most max_prefix_length.
std::vector<TranscriptEvent> StandardEventFamily(std::int64_t rounds,
                                                 int max_prefix_length = 3);

struct PrivacyAuditConfig {
  MechanismSpec mechanism;
  // Budget the mechanism claims; an entry fails when its lower bound
  // exceeds this.
  double theoretical_epsilon = 0;
  double delta_total = 0;
  std::int64_t trials = 100000;
  std::uint64_t master_seed = 0;
  double confidence = 0.99;
};

struct PrivacyLossEntry {
  std::string event;
  ProportionEstimate on_base;
  ProportionEstimate on_neighbor;
  double delta_total = 0;
  double theoretical_epsilon = 0;
  // ln((p - delta) / p') and ln((p' - delta) / p), clipped below at 0. Empty
  // when the denominator estimate is zero.
  std::optional<double> point_loss_forward;
  std::optional<double> point_loss_backward;
  // Same quantities with the numerator at its lower and the denominator at
  // its upper confidence limit.
  double lower_bound_forward = 0;
  double lower_bound_backward = 0;
  bool violation = false;

  double lower_bound() const {
    return std::max(lower_bound_forward, lower_bound_backward);
  }
};

// Monte-Carlo lower bounds on the privacy loss of the mechanism driven by the
// adversary on S and on S'. Requires at least 10^4 trials per side.
absl::StatusOr<std::vector<PrivacyLossEntry>> EstimatePrivacyLoss(
    const PrivacyAuditConfig& config, const NeighborPair& pair,
    const DeterministicAdversary& adversary,
    std::span<const TranscriptEvent> events);

}  // namespace dpsvt

#endif  // DPSVT_PRIVACY_AUDIT_H_
