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

#ifndef DPSVT_PRIVACY_CALC_H_
#define DPSVT_PRIVACY_CALC_H_

// Closed-form privacy bounds for the threshold monitors and their numeric
// inversion. All logarithms are natural.

#include <cstdint>

#include "absl/status/statusor.h"

namespace dpsvt {

struct PrivacyBudget {
  double epsilon = 0;
  double delta = 0;
};

// Noise cap of ThresholdMonitor:
//   (1/epsilon) ln(1/delta) * ln((1/epsilon) ln(1/delta)).
// Requires (1/epsilon) ln(1/delta) > 1.
absl::StatusOr<double> DeltaCap(double epsilon, double delta);

// One ThresholdMonitor run with budget k is (xi, 3 delta)-DP for
//   xi = 75 (k + 1) epsilon / ln(1/delta) + 25 epsilon.
absl::StatusOr<double> XiBound(double epsilon, double delta, double k);

// Adaptive composition of ell (epsilon, delta)-DP steps:
//   (sqrt(2 ell ln(1/delta_hat)) epsilon + ell epsilon (e^epsilon - 1),
//    ell delta + delta_hat).
absl::StatusOr<PrivacyBudget> AdvancedComposition(double epsilon, double delta,
                                                  std::int64_t ell,
                                                  double delta_hat);

// Number of counter epochs max(1, ceil(k / ln(1/delta))) used by
// Epsilon0Bound.
std::int64_t EpochCount(double delta, double k);

// Total budget of a ThresholdMonitor run with parameters (epsilon, delta, k).
// Each epoch spends at most ln(1/delta) of an element's budget, so it is
// (XiBound(epsilon, delta, ln(1/delta)), 3 delta)-DP; epochs compose through
// AdvancedComposition with delta_hat = delta. When k <= ln(1/delta) a single
// epoch suffices and the result is (XiBound(epsilon, delta, k), 4 delta).
absl::StatusOr<PrivacyBudget> Epsilon0Bound(double epsilon, double delta,
                                            double k);

struct MonitorParameters {
  double epsilon = 0;
  double delta = 0;
};

// Largest per-run epsilon (to relative precision 1e-9) with
// delta = target.delta / (3k + 1) such that Epsilon0Bound stays within the
// target budget componentwise.
absl::StatusOr<MonitorParameters> CalibrateMonitor(const PrivacyBudget& target,
                                                   double k);

struct EvolvingScales {
  double epsilon_tilde = 0;
  double delta_tilde = 0;
  // Cap and w-noise unit (w ~ Lap(10 * scale1)).
  double scale1 = 0;
  // Scale of the capped noise v ~ Lap(scale2).
  double scale2 = 0;
};

// Noise scales for ThresholdMonitorEvolving meeting the target budget for
// per-user budget k: scale1 = DeltaCap(eps~, delta~), scale2 =
// (1/eps~) ln(1/delta~) with (eps~, delta~) = CalibrateMonitor(target, k).
absl::StatusOr<EvolvingScales> CalibrateEvolving(const PrivacyBudget& target,
                                                 double k, std::int64_t users);

// Error target of the shifting heavy-hitters solver:
//   constant * (sqrt(k) / epsilon) * ln(1/delta) * ln(m * domain_size / beta).
absl::StatusOr<double> Tau(double k, double epsilon, double delta, double m,
                           double domain_size, double beta, double constant);

}  // namespace dpsvt

#endif  // DPSVT_PRIVACY_CALC_H_
