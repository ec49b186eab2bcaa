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

#include "dpsvt/privacy_audit.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpsvt/parallel.h"

namespace dpsvt {
namespace {

constexpr std::int64_t kMinTrials = 10000;

std::string PrefixName(const Transcript& prefix) {
  std::string name = "prefix=";
  for (Answer a : prefix) name += a == Answer::kTop ? 'T' : 'B';
  return name;
}

// ln((numerator - delta) / denominator), clipped below at 0.
double ClippedLoss(double numerator, double denominator, double delta) {
  const double excess = numerator - delta;
  if (excess <= 0) return 0.0;
  return std::max(0.0, std::log(excess / denominator));
}

std::optional<double> PointLoss(double numerator, double denominator,
                                double delta) {
  if (numerator - delta <= 0) return 0.0;
  if (denominator <= 0) return std::nullopt;
  return ClippedLoss(numerator, denominator, delta);
}

absl::StatusOr<std::vector<std::int64_t>> CountEventHits(
    const PrivacyAuditConfig& config, const Database& db,
    const DeterministicAdversary& adversary,
    std::span<const TranscriptEvent> events, std::uint64_t side) {
  const std::int64_t chunks = ChunkCount(config.trials);
  std::vector<std::vector<std::int64_t>> partial(
      static_cast<std::size_t>(chunks),
      std::vector<std::int64_t>(events.size(), 0));
  absl::Status status = ParallelChunks(
      config.trials,
      [&](std::int64_t begin, std::int64_t end,
          std::int64_t chunk) -> absl::Status {
        auto& hits = partial[static_cast<std::size_t>(chunk)];
        for (std::int64_t trial = begin; trial < end; ++trial) {
          NoiseSource noise = NoiseSource::ForTrial(
              config.master_seed, 2 * static_cast<std::uint64_t>(trial) + side);
          absl::StatusOr<Transcript> transcript =
              Interact(config.mechanism, db, adversary, std::move(noise));
          if (!transcript.ok()) return transcript.status();
          for (std::size_t e = 0; e < events.size(); ++e) {
            hits[e] += events[e].holds(*transcript);
          }
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  std::vector<std::int64_t> total(events.size(), 0);
  for (const auto& hits : partial) {
    for (std::size_t e = 0; e < events.size(); ++e) total[e] += hits[e];
  }
  return total;
}

}  // namespace

Database NeighborPair::Neighbor() const {
  Database neighbor = base;
  neighbor.Add(extra).IgnoreError();
  return neighbor;
}

std::vector<TranscriptEvent> StandardEventFamily(std::int64_t rounds,
                                                 int max_prefix_length) {
  std::vector<TranscriptEvent> events;
  for (std::int64_t r = 1; r <= rounds; ++r) {
    events.push_back(
        {absl::StrCat("first_top_le_", r), [r](std::span<const Answer> t) {
           const auto limit = std::min<std::size_t>(t.size(), r);
           return std::find(t.begin(), t.begin() + limit, Answer::kTop) !=
                  t.begin() + limit;
         }});
  }
  for (std::int64_t c = 1; c <= rounds; ++c) {
    events.push_back(
        {absl::StrCat("tops_ge_", c), [c](std::span<const Answer> t) {
           return std::count(t.begin(), t.end(), Answer::kTop) >= c;
         }});
  }
  const int max_len =
      static_cast<int>(std::min<std::int64_t>(max_prefix_length, rounds));
  for (int len = 1; len <= max_len; ++len) {
    for (int bits = 0; bits < (1 << len); ++bits) {
      Transcript prefix;
      for (int i = 0; i < len; ++i) {
        prefix.push_back((bits >> i) & 1 ? Answer::kTop : Answer::kBot);
      }
      events.push_back({PrefixName(prefix), [prefix](
                                                std::span<const Answer> t) {
                          return t.size() >= prefix.size() &&
                                 std::equal(prefix.begin(), prefix.end(),
                                            t.begin());
                        }});
    }
  }
  return events;
}

absl::StatusOr<std::vector<PrivacyLossEntry>> EstimatePrivacyLoss(
    const PrivacyAuditConfig& config, const NeighborPair& pair,
    const DeterministicAdversary& adversary,
    std::span<const TranscriptEvent> events) {
  if (config.trials < kMinTrials) {
    return absl::InvalidArgumentError(absl::StrCat(
        "privacy audit needs at least ", kMinTrials, " trials, got ",
        config.trials));
  }
  if (!(config.confidence > 0 && config.confidence < 1)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  absl::StatusOr<std::vector<std::int64_t>> base_hits =
      CountEventHits(config, pair.base, adversary, events, 0);
  if (!base_hits.ok()) return base_hits.status();
  absl::StatusOr<std::vector<std::int64_t>> neighbor_hits =
      CountEventHits(config, pair.Neighbor(), adversary, events, 1);
  if (!neighbor_hits.ok()) return neighbor_hits.status();

  std::vector<PrivacyLossEntry> entries;
  entries.reserve(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    PrivacyLossEntry entry;
    entry.event = events[e].name;
    entry.on_base = EstimateProportion((*base_hits)[e], config.trials,
                                       config.confidence);
    entry.on_neighbor = EstimateProportion((*neighbor_hits)[e], config.trials,
                                           config.confidence);
    entry.delta_total = config.delta_total;
    entry.theoretical_epsilon = config.theoretical_epsilon;
    const double p = entry.on_base.estimate;
    const double p_prime = entry.on_neighbor.estimate;
    entry.point_loss_forward = PointLoss(p, p_prime, config.delta_total);
    entry.point_loss_backward = PointLoss(p_prime, p, config.delta_total);
    entry.lower_bound_forward =
        ClippedLoss(entry.on_base.interval.lower,
                    entry.on_neighbor.interval.upper, config.delta_total);
    entry.lower_bound_backward =
        ClippedLoss(entry.on_neighbor.interval.lower,
                    entry.on_base.interval.upper, config.delta_total);
    entry.violation = entry.lower_bound() > config.theoretical_epsilon;
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace dpsvt
