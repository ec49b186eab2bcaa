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

#include "dpsvt/stream.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsvt/noise.h"
#include "json.hpp"

namespace dpsvt {
namespace {

using json = nlohmann::json;

std::vector<std::vector<std::int64_t>> RandomPartition(std::int64_t users,
                                                       std::int64_t set_size,
                                                       std::mt19937_64& rng) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(users));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::int64_t>> sets;
  for (std::int64_t begin = 0; begin < users; begin += set_size) {
    const std::int64_t end = std::min(users, begin + set_size);
    sets.emplace_back(order.begin() + begin, order.begin() + end);
  }
  return sets;
}

std::unordered_map<ElementId, std::int64_t> Weights(
    const UserSnapshot& snapshot) {
  std::unordered_map<ElementId, std::int64_t> weights;
  weights.reserve(snapshot.size());
  for (ElementId x : snapshot) ++weights[x];
  return weights;
}

}  // namespace

const char* TierName(Tier tier) {
  switch (tier) {
    case Tier::kA:
      return "A";
    case Tier::kB:
      return "B";
    case Tier::kC:
      return "C";
    case Tier::kNone:
      break;
  }
  return "-";
}

absl::StatusOr<Example1Shape> Example1ShapeFor(std::int64_t users) {
  if (users < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 users, got ", users));
  }
  Example1Shape shape;
  shape.a_size = static_cast<std::int64_t>(
      std::ceil(std::log2(static_cast<double>(users))));
  shape.b_size = std::llround(std::sqrt(std::sqrt(static_cast<double>(users))));
  shape.c_size = std::llround(std::cbrt(static_cast<double>(users)));
  const std::int64_t sizes[] = {shape.a_size, shape.b_size, shape.c_size};
  for (std::int64_t s : sizes) {
    if (s < 2 || s > users) {
      return absl::InvalidArgumentError(
          absl::StrCat("tier set size ", s, " unusable for ", users, " users"));
    }
  }
  if (shape.a_size == shape.b_size || shape.a_size == shape.c_size ||
      shape.b_size == shape.c_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tier set sizes ", shape.a_size, "/", shape.b_size, "/", shape.c_size,
        " are not distinct for ", users, " users"));
  }
  auto sets = [users](std::int64_t size) { return (users + size - 1) / size; };
  shape.a_sets = sets(shape.a_size);
  shape.b_sets = sets(shape.b_size);
  shape.c_sets = sets(shape.c_size);
  return shape;
}

absl::StatusOr<UserStream> GenerateExample1(std::int64_t users,
                                            std::uint64_t seed) {
  absl::StatusOr<Example1Shape> shape = Example1ShapeFor(users);
  if (!shape.ok()) return shape.status();

  struct Set {
    Tier tier;
    std::vector<std::int64_t> members;
  };
  std::vector<Set> sets;
  const std::pair<Tier, std::int64_t> tiers[] = {
      {Tier::kA, shape->a_size},
      {Tier::kB, shape->b_size},
      {Tier::kC, shape->c_size}};
  for (std::uint64_t t = 0; t < 3; ++t) {
    std::mt19937_64 rng(DeriveSeed(seed, t));
    for (auto& members : RandomPartition(users, tiers[t].second, rng)) {
      sets.push_back(Set{tiers[t].first, std::move(members)});
    }
  }
  std::mt19937_64 schedule_rng(DeriveSeed(seed, 3));
  std::shuffle(sets.begin(), sets.end(), schedule_rng);

  const std::int64_t steps = std::ssize(sets);
  UserStream stream;
  stream.users = users;
  stream.snapshots.reserve(sets.size());
  stream.planted.reserve(sets.size());
  for (std::int64_t s = 0; s < steps; ++s) {
    const Set& set = sets[static_cast<std::size_t>(s)];
    const ElementId heavy = MakeElement(s + 1);
    UserSnapshot snapshot(static_cast<std::size_t>(users));
    for (std::int64_t j = 0; j < users; ++j) {
      snapshot[static_cast<std::size_t>(j)] =
          MakeElement(steps + 1 + s * users + j);
    }
    for (std::int64_t j : set.members) {
      snapshot[static_cast<std::size_t>(j)] = heavy;
    }
    stream.snapshots.push_back(std::move(snapshot));
    stream.planted.push_back(PlantedHeavy{
        .step = s + 1,
        .element = heavy,
        .tier = set.tier,
        .weight = std::ssize(set.members)});
  }
  return stream;
}

absl::StatusOr<UserStream> ConstantStream(std::int64_t users,
                                          ElementId element,
                                          std::int64_t steps) {
  if (users < 1 || steps < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad constant stream users=", users, " steps=", steps));
  }
  UserStream stream;
  stream.users = users;
  stream.snapshots.assign(static_cast<std::size_t>(steps),
                          UserSnapshot(static_cast<std::size_t>(users),
                                       element));
  return stream;
}

std::vector<std::int64_t> HeavyParticipation(const UserStream& stream,
                                             double min_weight) {
  std::vector<std::int64_t> count(static_cast<std::size_t>(stream.users), 0);
  for (const UserSnapshot& snapshot : stream.snapshots) {
    const auto weights = Weights(snapshot);
    for (std::size_t j = 0; j < snapshot.size(); ++j) {
      if (static_cast<double>(weights.at(snapshot[j])) >= min_weight) {
        ++count[j];
      }
    }
  }
  return count;
}

absl::StatusOr<KStarResolution> ResolveKStar(
    const UserStream& stream,
    const std::function<absl::StatusOr<double>(std::int64_t)>& heavy_weight,
    std::int64_t max_k) {
  auto evaluate = [&](std::int64_t k) -> absl::StatusOr<KStarResolution> {
    absl::StatusOr<double> w = heavy_weight(k);
    if (!w.ok()) return w.status();
    const auto counts = HeavyParticipation(stream, *w);
    const std::int64_t max_count =
        counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    return KStarResolution{
        .k = k, .heavy_weight = *w, .max_participation = max_count};
  };
  auto holds = [](const KStarResolution& r) {
    return r.max_participation <= r.k;
  };

  std::int64_t k = 1;
  absl::StatusOr<KStarResolution> hi = evaluate(k);
  if (!hi.ok()) return hi.status();
  while (!holds(*hi)) {
    if (k >= max_k) {
      return absl::NotFoundError(absl::StrCat("no k <= ", max_k, " works"));
    }
    k *= 2;
    hi = evaluate(k);
    if (!hi.ok()) return hi.status();
  }
  // k / 2 fails (or k == 1); bisect on (lo, hi].
  std::int64_t lo = k / 2;
  while (hi->k - lo > 1) {
    const std::int64_t mid = lo + (hi->k - lo) / 2;
    absl::StatusOr<KStarResolution> r = evaluate(mid);
    if (!r.ok()) return r.status();
    if (holds(*r)) {
      hi = r;
    } else {
      lo = mid;
    }
  }
  return *hi;
}

absl::Status WriteStream(const UserStream& stream, std::ostream& out) {
  std::int64_t step = 1;
  for (const UserSnapshot& snapshot : stream.snapshots) {
    json inputs = json::array();
    for (ElementId x : snapshot) inputs.push_back(ElementValue(x));
    out << json{{"step", step++}, {"inputs", std::move(inputs)}}.dump()
        << '\n';
  }
  if (!out) return absl::DataLossError("failed writing stream");
  return absl::OkStatus();
}

absl::StatusOr<UserStream> ReadStream(std::istream& in) {
  UserStream stream;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object() ||
        !record.contains("step") || !record["step"].is_number_integer() ||
        !record.contains("inputs") || !record["inputs"].is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": malformed stream record"));
    }
    const std::int64_t step = record["step"].get<std::int64_t>();
    if (step != std::ssize(stream.snapshots) + 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected step ", stream.snapshots.size() + 1,
          ", got ", step));
    }
    UserSnapshot snapshot;
    for (const json& x : record["inputs"]) {
      if (!x.is_number_integer()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": inputs must be integers"));
      }
      snapshot.push_back(MakeElement(x.get<std::int64_t>()));
    }
    if (stream.snapshots.empty()) {
      stream.users = std::ssize(snapshot);
    } else if (std::ssize(snapshot) != stream.users) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": ", snapshot.size(), " inputs, expected ",
          stream.users));
    }
    stream.snapshots.push_back(std::move(snapshot));
  }
  return stream;
}

absl::Status WriteQueries(std::span<const Query> queries, std::ostream& out) {
  for (const Query& q : queries) {
    json weights = json::object();
    for (const auto& [x, w] : q.weights()) {
      weights[std::to_string(ElementValue(x))] = w;
    }
    out << json{{"weights", std::move(weights)}}.dump() << '\n';
  }
  if (!out) return absl::DataLossError("failed writing queries");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Query>> ReadQueries(std::istream& in) {
  std::vector<Query> queries;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object() ||
        !record.contains("weights") || !record["weights"].is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": malformed query record"));
    }
    std::map<ElementId, double> weights;
    for (const auto& [key, value] : record["weights"].items()) {
      std::int64_t id = 0;
      std::size_t used = 0;
      try {
        id = std::stoll(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != key.size() || !value.is_number()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_no, ": bad weight entry for '", key, "'"));
      }
      weights[MakeElement(id)] = value.get<double>();
    }
    absl::StatusOr<Query> q = Query::Create(std::move(weights));
    if (!q.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", q.status().message()));
    }
    queries.push_back(*std::move(q));
  }
  return queries;
}

}  // namespace dpsvt
