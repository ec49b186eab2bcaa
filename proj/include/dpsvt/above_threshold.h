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

#ifndef DPSVT_ABOVE_THRESHOLD_H_
#define DPSVT_ABOVE_THRESHOLD_H_

#include <utility>

#include "absl/status/statusor.h"
#include "dpsvt/database.h"
#include "dpsvt/noise.h"
#include "dpsvt/types.h"

namespace dpsvt {

// The classic sparse-vector mechanism: compares noisy sensitivity-1 query
// values against a noisy threshold and halts at the first Top. It is
// (epsilon, 0)-differentially private.
class AboveThreshold {
 public:
  // Draws the noisy threshold t + Lap(2 / epsilon) once.
  static absl::StatusOr<AboveThreshold> Create(Database db, double epsilon,
                                               double threshold,
                                               NoiseSource noise);

  // Answers q(S) + Lap(4 / epsilon) >= noisy threshold. Fails once halted.
  absl::StatusOr<Answer> Step(const Query& q);

  // Same as Step for a precomputed sensitivity-1 value.
  absl::StatusOr<Answer> StepValue(double value);

  bool halted() const { return halted_; }
  double epsilon() const { return epsilon_; }
  // Non-private; exposed for tests.
  double noisy_threshold() const { return noisy_threshold_; }
  const Database& database() const { return db_; }

  // Moves the noise source out so a successor instance can continue the same
  // stream of draws. The instance must not be stepped afterwards.
  NoiseSource ReleaseNoise() && { return std::move(noise_); }

 private:
  AboveThreshold(Database db, double epsilon, double noisy_threshold,
                 LaplaceScale query_scale, NoiseSource noise)
      : db_(std::move(db)),
        epsilon_(epsilon),
        noisy_threshold_(noisy_threshold),
        query_scale_(query_scale),
        noise_(std::move(noise)) {}

  Database db_;
  double epsilon_;
  double noisy_threshold_;
  LaplaceScale query_scale_;
  NoiseSource noise_;
  bool halted_ = false;
};

}  // namespace dpsvt

#endif  // DPSVT_ABOVE_THRESHOLD_H_
