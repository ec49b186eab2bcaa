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

#ifndef DPSVT_HEAVY_HITTERS_H_
#define DPSVT_HEAVY_HITTERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsvt/evolving.h"
#include "dpsvt/noise.h"
#include "dpsvt/types.h"

namespace dpsvt {

struct HeavyHitterReport {
  std::int64_t step = 0;
  // Sorted by element id.
  std::vector<ElementId> identified;
};

// Distinct elements of a snapshot in order of first appearance, with the
// users holding each one.
struct Candidates {
  std::vector<ElementId> elements;
  std::vector<std::vector<std::int64_t>> holders;
};

Candidates CollectCandidates(std::span<const ElementId> snapshot);

// Shifting heavy hitters on top of ThresholdMonitorEvolving. Every step asks
// one point query per distinct element of the current snapshot, in order of
// first appearance, and reports the elements answered Top. Elements no user
// holds are never queried and therefore never reported.
class ShiftingHeavyHitters {
 public:
  static absl::StatusOr<ShiftingHeavyHitters> Create(
      const EvolvingConfig& config, NoiseSource noise);

  absl::StatusOr<HeavyHitterReport> Step(std::span<const ElementId> snapshot);
  // Same as Step with the candidates of the snapshot already collected.
  absl::StatusOr<HeavyHitterReport> Step(const Candidates& candidates);

  const ThresholdMonitorEvolving& monitor() const { return monitor_; }

 private:
  explicit ShiftingHeavyHitters(ThresholdMonitorEvolving monitor)
      : monitor_(std::move(monitor)) {}

  ThresholdMonitorEvolving monitor_;
  std::int64_t step_ = 1;
};

absl::StatusOr<std::vector<HeavyHitterReport>> RunShiftingHeavyHitters(
    const EvolvingConfig& config, std::span<const UserSnapshot> snapshots,
    NoiseSource noise);

}  // namespace dpsvt

#endif  // DPSVT_HEAVY_HITTERS_H_
