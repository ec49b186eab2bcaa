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

#ifndef DPSVT_NOISE_H_
#define DPSVT_NOISE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"

namespace dpsvt {

// Scale parameter b of the Laplace distribution Lap(b), whose density is
// exp(-|x| / b) / (2b). Always strictly positive.
class LaplaceScale {
 public:
  static absl::StatusOr<LaplaceScale> Create(double b);

  double value() const { return b_; }

 private:
  explicit LaplaceScale(double b) : b_(b) {}
  double b_;
};

// Randomness behind every Laplace draw made by the mechanisms.
//
// A seeded source is a 64-bit Mersenne twister; two sources built from the
// same seed emit identical sample sequences. A scripted source replays a
// fixed list of values verbatim (ignoring the requested scale) and fails once
// the list is exhausted. Scripted sources let tests pin every noise draw of a
// mechanism, in the order the mechanism consumes them.
//
// A source is single-owner and not thread-safe.
class NoiseSource {
 public:
  static NoiseSource Seeded(std::uint64_t seed);
  static NoiseSource Scripted(std::vector<double> values);
  // Independent stream for one trial of a Monte-Carlo experiment.
  static NoiseSource ForTrial(std::uint64_t master_seed, std::uint64_t trial);

  bool is_scripted() const {
    return std::holds_alternative<Script>(state_);
  }

  // Uniform draw in the open interval (0, 1). In scripted mode returns the
  // next scripted value.
  absl::StatusOr<double> NextUniform();

  // Number of scripted values not yet consumed; zero for seeded sources.
  std::size_t remaining() const;

 private:
  friend absl::StatusOr<double> SampleLaplace(NoiseSource& source,
                                              LaplaceScale scale);

  struct Script {
    std::vector<double> values;
    std::size_t next = 0;
  };

  explicit NoiseSource(std::mt19937_64 engine) : state_(std::move(engine)) {}
  explicit NoiseSource(Script script) : state_(std::move(script)) {}

  absl::StatusOr<double> NextScripted();

  std::variant<std::mt19937_64, Script> state_;
};

// Mixes a master seed and an index into a well-separated child seed.
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index);

// One draw from Lap(scale) by inverse-CDF transform of a single uniform.
absl::StatusOr<double> SampleLaplace(NoiseSource& source, LaplaceScale scale);

// min(SampleLaplace(source, scale), cap). Only the upper tail is capped.
absl::StatusOr<double> SampleCappedLaplace(NoiseSource& source,
                                           LaplaceScale scale, double cap);

// Inverse of the Laplace CDF at u in (0, 1).
double LaplaceQuantile(double u, double b);

// Laplace CDF at x.
double LaplaceCdf(double x, double b);

}  // namespace dpsvt

#endif  // DPSVT_NOISE_H_
