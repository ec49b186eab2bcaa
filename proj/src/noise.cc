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

#include "dpsvt/noise.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpsvt/types.h"

namespace dpsvt {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

int CountTops(const Transcript& transcript) {
  int tops = 0;
  for (Answer a : transcript) tops += a == Answer::kTop;
  return tops;
}

absl::StatusOr<LaplaceScale> LaplaceScale::Create(double b) {
  if (!(b > 0) || !std::isfinite(b)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", b));
  }
  return LaplaceScale(b);
}

NoiseSource NoiseSource::Seeded(std::uint64_t seed) {
  return NoiseSource(std::mt19937_64(seed));
}

NoiseSource NoiseSource::Scripted(std::vector<double> values) {
  return NoiseSource(Script{std::move(values), 0});
}

NoiseSource NoiseSource::ForTrial(std::uint64_t master_seed,
                                  std::uint64_t trial) {
  return Seeded(DeriveSeed(master_seed, trial));
}

std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index) {
  return SplitMix64(master_seed ^ SplitMix64(index));
}

absl::StatusOr<double> NoiseSource::NextScripted() {
  auto& script = std::get<Script>(state_);
  if (script.next >= script.values.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "scripted noise exhausted after ", script.values.size(), " draws"));
  }
  return script.values[script.next++];
}

absl::StatusOr<double> NoiseSource::NextUniform() {
  if (is_scripted()) return NextScripted();
  auto& engine = std::get<std::mt19937_64>(state_);
  // 53 random bits on the grid k * 2^-53; the endpoint 0 is rejected and 1
  // is unreachable.
  while (true) {
    const std::uint64_t bits = engine() >> 11;
    if (bits != 0) return static_cast<double>(bits) * 0x1.0p-53;
  }
}

std::size_t NoiseSource::remaining() const {
  if (const auto* script = std::get_if<Script>(&state_)) {
    return script->values.size() - script->next;
  }
  return 0;
}

double LaplaceQuantile(double u, double b) {
  if (u < 0.5) return b * std::log(2.0 * u);
  return -b * std::log(2.0 * (1.0 - u));
}

double LaplaceCdf(double x, double b) {
  if (x < 0) return 0.5 * std::exp(x / b);
  return 1.0 - 0.5 * std::exp(-x / b);
}

absl::StatusOr<double> SampleLaplace(NoiseSource& source, LaplaceScale scale) {
  if (source.is_scripted()) return source.NextScripted();
  absl::StatusOr<double> u = source.NextUniform();
  if (!u.ok()) return u.status();
  return LaplaceQuantile(*u, scale.value());
}

absl::StatusOr<double> SampleCappedLaplace(NoiseSource& source,
                                           LaplaceScale scale, double cap) {
  absl::StatusOr<double> x = SampleLaplace(source, scale);
  if (!x.ok()) return x.status();
  return std::min(*x, cap);
}

}  // namespace dpsvt
