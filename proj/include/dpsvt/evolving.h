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

#ifndef DPSVT_EVOLVING_H_
#define DPSVT_EVOLVING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsvt/database.h"
#include "dpsvt/noise.h"
#include "dpsvt/types.h"

namespace dpsvt {

// Inputs of all n users at one time step; position j holds user j's element.
using UserSnapshot = std::vector<ElementId>;

struct EvolvingConfig {
  // Privacy target the scales were calibrated for. Informational only; the
  // noise is fully determined by scale1 and scale2.
  double epsilon = 1.0;
  double delta = 1e-6;
  double threshold = 0.0;
  // Per-user budget k; +infinity disables exclusion.
  double budget = 1.0;
  // Noise cap and w-noise unit: w ~ Lap(10 * scale1), v capped at scale1.
  double scale1 = 0.0;
  // v ~ Lap(scale2).
  double scale2 = 0.0;
  std::int64_t users = 0;

  absl::Status Validate() const;
};

// ThresholdMonitor over data that changes every round. User j keeps
// contributing to query sums until its counter c(j) reaches the budget; a Top
// answer charges every user j the weight f(x_{i,j}) of its current input,
// exhausted users included.
class ThresholdMonitorEvolving {
 public:
  static absl::StatusOr<ThresholdMonitorEvolving> Create(
      const EvolvingConfig& config, NoiseSource noise);

  absl::StatusOr<Answer> Step(std::span<const ElementId> snapshot,
                              const Query& q);

  // Step for the point query f_x(y) = 1{y = x}, given the users currently
  // holding x. Consumes noise and updates counters exactly as
  // Step(snapshot, Query::Point(x)) would.
  absl::StatusOr<Answer> StepPoint(std::span<const std::int64_t> holders);

  const EvolvingConfig& config() const { return config_; }
  const std::vector<double>& counters() const { return counters_; }
  std::int64_t round() const { return round_; }

 private:
  ThresholdMonitorEvolving(const EvolvingConfig& config, LaplaceScale w_scale,
                           LaplaceScale v_scale, NoiseSource noise)
      : config_(config),
        counters_(static_cast<std::size_t>(config.users), 0.0),
        w_scale_(w_scale),
        v_scale_(v_scale),
        noise_(std::move(noise)) {}

  // Draws w then v and compares against the threshold.
  absl::StatusOr<Answer> Decide(double true_value);

  EvolvingConfig config_;
  std::vector<double> counters_;
  LaplaceScale w_scale_;
  LaplaceScale v_scale_;
  NoiseSource noise_;
  std::int64_t round_ = 1;
};

}  // namespace dpsvt

#endif  // DPSVT_EVOLVING_H_
