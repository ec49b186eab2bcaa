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

#ifndef DPSVT_AUDIT_SCENARIOS_H_
#define DPSVT_AUDIT_SCENARIOS_H_

#include <cstdint>

#include "dpsvt/interact.h"
#include "dpsvt/privacy_audit.h"

namespace dpsvt {

// Neighbor pair, analyst and suggested threshold for an audit run.
struct AuditScenario {
  NeighborPair pair;
  DeterministicAdversary adversary;
  double threshold = 0;
};

// S = {1, ..., size}, x' = size + 1. Every round asks the counting query
// over S + {x'}; the threshold sits at size + offset.
AuditScenario CountingScenario(std::int64_t size, std::int64_t rounds,
                               double offset);

// S holds `rounds` disjoint blocks of block_size elements and x' = 0. Round
// i asks the block indexed by the number of Tops seen so far together with
// x', both with weight 1, so the live value stays at block_size while fresh
// blocks remain. The threshold is block_size + cap, so the w-noised value
// is centered on t - cap.
AuditScenario NearThresholdScenario(std::int64_t rounds,
                                    std::int64_t block_size, double cap);

}  // namespace dpsvt

#endif  // DPSVT_AUDIT_SCENARIOS_H_
