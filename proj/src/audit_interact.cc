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

#include "dpsvt/interact.h"

#include <memory>
#include <utility>

#include "absl/status/status.h"
#include "dpsvt/above_threshold.h"

namespace dpsvt {

DeterministicAdversary FixedQueries(std::vector<Query> queries) {
  auto shared = std::make_shared<const std::vector<Query>>(std::move(queries));
  const auto rounds = static_cast<std::int64_t>(shared->size());
  return DeterministicAdversary{
      .next_query =
          [shared](std::span<const Answer> prefix) {
            return (*shared)[prefix.size()];
          },
      .rounds = rounds};
}

absl::StatusOr<Transcript> Interact(const MechanismSpec& mechanism,
                                    const Database& db,
                                    const DeterministicAdversary& adversary,
                                    NoiseSource noise) {
  if (adversary.rounds < 0 || !adversary.next_query) {
    return absl::InvalidArgumentError("adversary needs a strategy and a "
                                      "nonnegative round limit");
  }
  Transcript transcript;
  transcript.reserve(static_cast<std::size_t>(adversary.rounds));

  if (mechanism.kind == MechanismKind::kAboveThreshold) {
    absl::StatusOr<AboveThreshold> at =
        AboveThreshold::Create(db, mechanism.config.epsilon,
                               mechanism.config.threshold, std::move(noise));
    if (!at.ok()) return at.status();
    while (std::ssize(transcript) < adversary.rounds && !at->halted()) {
      absl::StatusOr<Answer> a = at->Step(adversary.next_query(transcript));
      if (!a.ok()) return a.status();
      transcript.push_back(*a);
    }
    return transcript;
  }

  absl::StatusOr<ThresholdMonitor> monitor =
      ThresholdMonitor::Create(db, mechanism.config, std::move(noise));
  if (!monitor.ok()) return monitor.status();
  while (std::ssize(transcript) < adversary.rounds) {
    absl::StatusOr<Answer> a = monitor->Step(adversary.next_query(transcript));
    if (!a.ok()) return a.status();
    transcript.push_back(*a);
  }
  return transcript;
}

}  // namespace dpsvt
