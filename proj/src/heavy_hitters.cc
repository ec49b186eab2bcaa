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

#include "dpsvt/heavy_hitters.h"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsvt {

Candidates CollectCandidates(std::span<const ElementId> snapshot) {
  Candidates out;
  std::unordered_map<ElementId, std::size_t> index;
  index.reserve(snapshot.size());
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    auto [it, inserted] = index.try_emplace(snapshot[j], out.elements.size());
    if (inserted) {
      out.elements.push_back(snapshot[j]);
      out.holders.emplace_back();
    }
    out.holders[it->second].push_back(static_cast<std::int64_t>(j));
  }
  return out;
}

absl::StatusOr<ShiftingHeavyHitters> ShiftingHeavyHitters::Create(
    const EvolvingConfig& config, NoiseSource noise) {
  absl::StatusOr<ThresholdMonitorEvolving> monitor =
      ThresholdMonitorEvolving::Create(config, std::move(noise));
  if (!monitor.ok()) return monitor.status();
  return ShiftingHeavyHitters(*std::move(monitor));
}

absl::StatusOr<HeavyHitterReport> ShiftingHeavyHitters::Step(
    std::span<const ElementId> snapshot) {
  if (std::ssize(snapshot) != monitor_.config().users) {
    return absl::InvalidArgumentError(
        absl::StrCat("snapshot has ", snapshot.size(), " inputs, expected ",
                     monitor_.config().users));
  }
  return Step(CollectCandidates(snapshot));
}

absl::StatusOr<HeavyHitterReport> ShiftingHeavyHitters::Step(
    const Candidates& candidates) {
  HeavyHitterReport report{.step = step_++, .identified = {}};
  for (std::size_t c = 0; c < candidates.elements.size(); ++c) {
    absl::StatusOr<Answer> a = monitor_.StepPoint(candidates.holders[c]);
    if (!a.ok()) return a.status();
    if (*a == Answer::kTop) report.identified.push_back(candidates.elements[c]);
  }
  std::sort(report.identified.begin(), report.identified.end());
  return report;
}

absl::StatusOr<std::vector<HeavyHitterReport>> RunShiftingHeavyHitters(
    const EvolvingConfig& config, std::span<const UserSnapshot> snapshots,
    NoiseSource noise) {
  absl::StatusOr<ShiftingHeavyHitters> solver =
      ShiftingHeavyHitters::Create(config, std::move(noise));
  if (!solver.ok()) return solver.status();
  std::vector<HeavyHitterReport> reports;
  reports.reserve(snapshots.size());
  for (const UserSnapshot& snapshot : snapshots) {
    absl::StatusOr<HeavyHitterReport> r = solver->Step(snapshot);
    if (!r.ok()) return r.status();
    reports.push_back(*std::move(r));
  }
  return reports;
}

}  // namespace dpsvt
