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

#include "dpsvt/privacy_calc.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpsvt {
namespace {

bool IsProbability(double delta) { return delta > 0 && delta < 1; }

double XiUnchecked(double epsilon, double delta, double k) {
  return 75.0 * (k + 1.0) * epsilon / std::log(1.0 / delta) + 25.0 * epsilon;
}

absl::Status CheckDelta(double delta) {
  if (!IsProbability(delta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> DeltaCap(double epsilon, double delta) {
  if (!(epsilon > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double base = std::log(1.0 / delta) / epsilon;
  if (!(base > 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "(1/epsilon) ln(1/delta) must exceed 1, got ", base));
  }
  return base * std::log(base);
}

absl::StatusOr<double> XiBound(double epsilon, double delta, double k) {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be nonnegative, got ", epsilon));
  }
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  if (!(k >= 1) || !std::isfinite(k)) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget k must be >= 1, got ", k));
  }
  return XiUnchecked(epsilon, delta, k);
}

absl::StatusOr<PrivacyBudget> AdvancedComposition(double epsilon, double delta,
                                                  std::int64_t ell,
                                                  double delta_hat) {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be nonnegative, got ", epsilon));
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  if (ell < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of compositions must be >= 1, got ", ell));
  }
  if (!IsProbability(delta_hat)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_hat must lie in (0, 1), got ", delta_hat));
  }
  const double l = static_cast<double>(ell);
  return PrivacyBudget{
      .epsilon = std::sqrt(2.0 * l * std::log(1.0 / delta_hat)) * epsilon +
                 l * epsilon * std::expm1(epsilon),
      .delta = l * delta + delta_hat};
}

std::int64_t EpochCount(double delta, double k) {
  const double per_epoch = std::log(1.0 / delta);
  if (k <= per_epoch) return 1;
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(k / per_epoch)));
}

absl::StatusOr<PrivacyBudget> Epsilon0Bound(double epsilon, double delta,
                                            double k) {
  absl::StatusOr<double> xi = XiBound(epsilon, delta, k);
  if (!xi.ok()) return xi.status();
  const std::int64_t epochs = EpochCount(delta, k);
  if (epochs == 1) return PrivacyBudget{.epsilon = *xi, .delta = 4.0 * delta};
  const double xi_epoch =
      XiUnchecked(epsilon, delta, std::log(1.0 / delta));
  return AdvancedComposition(xi_epoch, 3.0 * delta, epochs, delta);
}

absl::StatusOr<MonitorParameters> CalibrateMonitor(const PrivacyBudget& target,
                                                   double k) {
  if (!(target.epsilon > 0) || !std::isfinite(target.epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target epsilon must be positive, got ", target.epsilon));
  }
  if (absl::Status s = CheckDelta(target.delta); !s.ok()) return s;
  if (!(k >= 1) || !std::isfinite(k)) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget k must be >= 1, got ", k));
  }
  const double delta = target.delta / (3.0 * k + 1.0);

  auto feasible = [&](double epsilon) {
    absl::StatusOr<PrivacyBudget> b = Epsilon0Bound(epsilon, delta, k);
    return b.ok() && b->epsilon <= target.epsilon && b->delta <= target.delta;
  };

  // The monitor itself needs epsilon < ln(1/delta).
  double hi = std::min(target.epsilon, std::log(1.0 / delta) * (1 - 1e-12));
  double lo = 0;
  if (feasible(hi)) {
    lo = hi;
  } else {
    for (int iter = 0; iter < 400 && hi - lo > 1e-9 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  if (!(lo > 0) || !feasible(lo)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "no per-run epsilon meets target (", target.epsilon, ", ",
        target.delta, ") for k=", k));
  }
  return MonitorParameters{.epsilon = lo, .delta = delta};
}

absl::StatusOr<EvolvingScales> CalibrateEvolving(const PrivacyBudget& target,
                                                 double k,
                                                 std::int64_t users) {
  if (users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", users));
  }
  absl::StatusOr<MonitorParameters> params = CalibrateMonitor(target, k);
  if (!params.ok()) return params.status();
  absl::StatusOr<double> scale1 = DeltaCap(params->epsilon, params->delta);
  if (!scale1.ok()) return scale1.status();
  const double scale2 = std::log(1.0 / params->delta) / params->epsilon;
  if (!(scale2 < *scale1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "calibrated scales violate scale2 < scale1: ", scale2, " vs ",
        *scale1));
  }
  return EvolvingScales{.epsilon_tilde = params->epsilon,
                        .delta_tilde = params->delta,
                        .scale1 = *scale1,
                        .scale2 = scale2};
}

absl::StatusOr<double> Tau(double k, double epsilon, double delta, double m,
                           double domain_size, double beta, double constant) {
  if (!(k > 0 && epsilon > 0 && m > 0 && domain_size > 0 && beta > 0 &&
        constant > 0)) {
    return absl::InvalidArgumentError(
        "tau requires positive k, epsilon, m, domain size, beta and constant");
  }
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  const double union_log = std::log(m * domain_size / beta);
  if (!(union_log > 0)) {
    return absl::InvalidArgumentError(
        "m * domain_size / beta must exceed 1");
  }
  return constant * (std::sqrt(k) / epsilon) * std::log(1.0 / delta) *
         union_log;
}

}  // namespace dpsvt
