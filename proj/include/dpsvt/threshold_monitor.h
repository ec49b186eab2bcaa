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

#ifndef DPSVT_THRESHOLD_MONITOR_H_
#define DPSVT_THRESHOLD_MONITOR_H_

#include <cstdint>
#include <limits>
#include <map>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsvt/database.h"
#include "dpsvt/noise.h"
#include "dpsvt/types.h"

namespace dpsvt {

struct MonitorConfig {
  double epsilon = 1.0;
  double delta = 1e-6;
  double threshold = 0.0;
  // Contribution budget k. An element is deleted once its counter reaches k.
  // +infinity disables deletion.
  double budget = 1.0;

  // Requires epsilon > 0, delta in (0, 1), (1/epsilon) ln(1/delta) > 1 and
  // budget >= 1.
  absl::Status Validate() const;
};

struct RoundTrace;

// Sparse-vector mechanism that never halts. Each round adds two Laplace
// noises to the query value on the live database: w ~ Lap(10 * cap) and
// v ~ Lap(ln(1/delta) / epsilon) capped above at cap, where
//
//   cap = (1/epsilon) ln(1/delta) ln((1/epsilon) ln(1/delta)).
//
// A Top answer charges every element x its query weight f(x) and deletes the
// elements whose accumulated charge reaches the budget k. Counters are kept
// for every element ever charged, whether or not it is live.
//
// Only the Bot/Top answers are covered by the privacy guarantee. True and
// noisy query values are reachable solely through TracingThresholdMonitor.
class ThresholdMonitor {
 public:
  static absl::StatusOr<ThresholdMonitor> Create(Database db,
                                                 const MonitorConfig& config,
                                                 NoiseSource noise);

  absl::StatusOr<Answer> Step(const Query& q);

  const MonitorConfig& config() const { return config_; }
  const Database& live() const { return live_; }
  double counter(ElementId x) const;
  const std::map<ElementId, double>& counters() const { return counters_; }
  double delta_cap() const { return delta_cap_; }
  // 1-based index of the next round.
  std::int64_t round() const { return round_; }

 private:
  friend class TracingThresholdMonitor;

  ThresholdMonitor(Database db, const MonitorConfig& config, double delta_cap,
                   LaplaceScale w_scale, LaplaceScale v_scale,
                   NoiseSource noise)
      : config_(config),
        live_(std::move(db)),
        delta_cap_(delta_cap),
        w_scale_(w_scale),
        v_scale_(v_scale),
        noise_(std::move(noise)) {}

  absl::StatusOr<Answer> StepImpl(const Query& q, RoundTrace* trace);

  MonitorConfig config_;
  Database live_;
  std::map<ElementId, double> counters_;
  double delta_cap_;
  LaplaceScale w_scale_;
  LaplaceScale v_scale_;
  NoiseSource noise_;
  std::int64_t round_ = 1;
};

// Folds ThresholdMonitor::Step over a fixed query list.
absl::StatusOr<Transcript> RunThresholdMonitor(Database db,
                                               const MonitorConfig& config,
                                               std::span<const Query> queries,
                                               NoiseSource noise);

}  // namespace dpsvt

#endif  // DPSVT_THRESHOLD_MONITOR_H_
