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

#include "dpsvt/event_audit.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "dpsvt/parallel.h"

namespace dpsvt {

EventBounds NearThresholdEventBounds(double budget, double delta) {
  const double log_inv_delta = std::log(1.0 / delta);
  return EventBounds{
      .almost_top_weight = 15.0 * (budget + 1) + 5.0 * log_inv_delta,
      .special_almost_count = 30.0 * (budget + 1) + 10.0 * log_inv_delta};
}

RoundClass ClassifyRound(const InstrumentedRound& round, double threshold,
                         double delta_cap, double budget) {
  RoundClass out;
  if (round.trace.answer != Answer::kBot || round.extra_counter >= budget) {
    return out;
  }
  const double partial = round.trace.true_value + round.trace.w;
  out.almost_top = partial >= threshold - 2 * delta_cap;
  out.special_almost_top =
      threshold - round.extra_weight - delta_cap <= partial &&
      partial < threshold - delta_cap;
  return out;
}

EventTally TallyRounds(std::span<const InstrumentedRound> rounds,
                       double threshold, double delta_cap, double budget) {
  EventTally tally;
  for (const InstrumentedRound& round : rounds) {
    if (round.trace.answer == Answer::kTop) {
      if (round.extra_counter < budget) tally.top_weight += round.extra_weight;
      continue;
    }
    const RoundClass c = ClassifyRound(round, threshold, delta_cap, budget);
    if (c.almost_top) {
      tally.almost_top_weight += round.extra_weight;
      ++tally.almost_top_count;
    }
    tally.special_almost_count += c.special_almost_top;
  }
  return tally;
}

absl::StatusOr<EventTally> TallyEvents(const MonitorConfig& config,
                                       const NeighborPair& pair,
                                       const DeterministicAdversary& adversary,
                                       NoiseSource noise) {
  if (!adversary.next_query || adversary.rounds < 0) {
    return absl::InvalidArgumentError("adversary needs a strategy");
  }
  absl::StatusOr<TracingThresholdMonitor> monitor =
      TracingThresholdMonitor::Create(pair.base, config, std::move(noise));
  if (!monitor.ok()) return monitor.status();

  std::vector<InstrumentedRound> rounds;
  rounds.reserve(static_cast<std::size_t>(adversary.rounds));
  Transcript transcript;
  for (std::int64_t i = 0; i < adversary.rounds; ++i) {
    const Query q = adversary.next_query(transcript);
    const double counter_before = monitor->monitor().counter(pair.extra);
    absl::StatusOr<RoundTrace> trace = monitor->Step(q);
    if (!trace.ok()) return trace.status();
    transcript.push_back(trace->answer);
    rounds.push_back(InstrumentedRound{.trace = *trace,
                                       .extra_weight = q.weight(pair.extra),
                                       .extra_counter = counter_before});
  }
  return TallyRounds(rounds, config.threshold, monitor->monitor().delta_cap(),
                     config.budget);
}

absl::StatusOr<EventFrequencies> EstimateEventFrequencies(
    const MonitorConfig& config, const NeighborPair& pair,
    const DeterministicAdversary& adversary, std::int64_t trials,
    std::uint64_t master_seed, double confidence) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  const EventBounds bounds = NearThresholdEventBounds(config.budget, config.delta);

  struct Partial {
    std::int64_t e1 = 0, e2 = 0, e3 = 0;
    double max_weight = 0;
    std::int64_t max_special = 0;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(ChunkCount(trials)));
  absl::Status status = ParallelChunks(
      trials,
      [&](std::int64_t begin, std::int64_t end,
          std::int64_t chunk) -> absl::Status {
        Partial& p = partial[static_cast<std::size_t>(chunk)];
        for (std::int64_t trial = begin; trial < end; ++trial) {
          absl::StatusOr<EventTally> tally = TallyEvents(
              config, pair, adversary,
              NoiseSource::ForTrial(master_seed,
                                    static_cast<std::uint64_t>(trial)));
          if (!tally.ok()) return tally.status();
          const bool e1 = tally->almost_top_weight <= bounds.almost_top_weight;
          const bool e2 = static_cast<double>(tally->special_almost_count) <=
                          bounds.special_almost_count;
          p.e1 += e1;
          p.e2 += e2;
          p.e3 += e1 && e2;
          p.max_weight = std::max(p.max_weight, tally->almost_top_weight);
          p.max_special = std::max(p.max_special, tally->special_almost_count);
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  Partial total;
  for (const Partial& p : partial) {
    total.e1 += p.e1;
    total.e2 += p.e2;
    total.e3 += p.e3;
    total.max_weight = std::max(total.max_weight, p.max_weight);
    total.max_special = std::max(total.max_special, p.max_special);
  }
  return EventFrequencies{
      .e1 = EstimateProportion(total.e1, trials, confidence),
      .e2 = EstimateProportion(total.e2, trials, confidence),
      .e3 = EstimateProportion(total.e3, trials, confidence),
      .bounds = bounds,
      .max_almost_top_weight = total.max_weight,
      .max_special_almost_count = total.max_special};
}

}  // namespace dpsvt
