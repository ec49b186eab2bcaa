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

#ifndef DPSVT_INTERACT_H_
#define DPSVT_INTERACT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsvt/database.h"
#include "dpsvt/noise.h"
#include "dpsvt/threshold_monitor.h"
#include "dpsvt/types.h"

namespace dpsvt {

// An analyst that picks each query from the answers seen so far. The
// strategy must be deterministic: equal prefixes yield equal queries.
struct DeterministicAdversary {
  std::function<Query(std::span<const Answer>)> next_query;
  std::int64_t rounds = 0;
};

// Adversary that asks a fixed list of queries regardless of the answers.
DeterministicAdversary FixedQueries(std::vector<Query> queries);

enum class MechanismKind { kAboveThreshold, kThresholdMonitor };

// AboveThreshold reads only epsilon and threshold from config.
struct MechanismSpec {
  MechanismKind kind = MechanismKind::kThresholdMonitor;
  MonitorConfig config;
};

// Runs the adversary against the mechanism until the round limit or, for
// AboveThreshold, until it halts. Queries are recomputable from the answers,
// so only the answers are returned.
absl::StatusOr<Transcript> Interact(const MechanismSpec& mechanism,
                                    const Database& db,
                                    const DeterministicAdversary& adversary,
                                    NoiseSource noise);

}  // namespace dpsvt

#endif  // DPSVT_INTERACT_H_
