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

#ifndef DPSVT_STREAM_H_
#define DPSVT_STREAM_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsvt/database.h"
#include "dpsvt/evolving.h"
#include "dpsvt/types.h"

namespace dpsvt {

enum class Tier { kNone, kA, kB, kC };

const char* TierName(Tier tier);

// A step at which a whole set of users holds one common element.
struct PlantedHeavy {
  std::int64_t step = 0;  // 1-based
  ElementId element{};
  Tier tier = Tier::kNone;
  std::int64_t weight = 0;
};

struct UserStream {
  std::int64_t users = 0;
  std::vector<UserSnapshot> snapshots;
  // Sorted by step. Empty for streams without planted structure.
  std::vector<PlantedHeavy> planted;
};

struct Example1Shape {
  std::int64_t a_size = 0;  // ceil(log2 n)
  std::int64_t b_size = 0;  // round(n^(1/4))
  std::int64_t c_size = 0;  // round(n^(1/3))
  std::int64_t a_sets = 0;
  std::int64_t b_sets = 0;
  std::int64_t c_sets = 0;
};

// Set sizes and counts for n users. Fails when the three sizes are not
// pairwise distinct or a size is below 2.
absl::StatusOr<Example1Shape> Example1ShapeFor(std::int64_t users);

// Three independent random partitions of the users into sets of the tier
// sizes (the last set of a tier takes the leftover users). Each set gets one
// step, in shuffled order; at that step its users hold a fresh element and
// every other user holds an element no one else ever holds.
absl::StatusOr<UserStream> GenerateExample1(std::int64_t users,
                                            std::uint64_t seed);

// Every user holds `element` for `steps` steps.
absl::StatusOr<UserStream> ConstantStream(std::int64_t users,
                                          ElementId element,
                                          std::int64_t steps);

// For each user, the number of steps at which the element it holds is held
// by at least `min_weight` users.
std::vector<std::int64_t> HeavyParticipation(const UserStream& stream,
                                             double min_weight);

struct KStarResolution {
  std::int64_t k = 0;
  double heavy_weight = 0;
  std::int64_t max_participation = 0;
};

// Smallest integer k >= 1 with max_j participation_j <= k, where a step
// counts for user j when its element has weight >= heavy_weight(k).
// heavy_weight must be nondecreasing in k. Doubles k to bracket the answer,
// then bisects.
absl::StatusOr<KStarResolution> ResolveKStar(
    const UserStream& stream,
    const std::function<absl::StatusOr<double>(std::int64_t)>& heavy_weight,
    std::int64_t max_k = std::int64_t{1} << 40);

// Line-delimited JSON. Streams: {"step": i, "inputs": [elem, ...]} per line,
// steps numbered 1.. consecutively. Queries: {"weights": {"elem": w}}.
absl::Status WriteStream(const UserStream& stream, std::ostream& out);
absl::StatusOr<UserStream> ReadStream(std::istream& in);
absl::Status WriteQueries(std::span<const Query> queries, std::ostream& out);
absl::StatusOr<std::vector<Query>> ReadQueries(std::istream& in);

}  // namespace dpsvt

#endif  // DPSVT_STREAM_H_
