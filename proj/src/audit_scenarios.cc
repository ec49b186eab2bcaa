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

#include "dpsvt/audit_scenarios.h"

#include <map>
#include <utility>
#include <vector>

namespace dpsvt {

AuditScenario CountingScenario(std::int64_t size, std::int64_t rounds,
                               double offset) {
  std::vector<ElementId> elements;
  std::map<ElementId, double> weights;
  for (std::int64_t x = 1; x <= size; ++x) {
    elements.push_back(MakeElement(x));
    weights[MakeElement(x)] = 1.0;
  }
  const ElementId extra = MakeElement(size + 1);
  weights[extra] = 1.0;
  Query q = *Query::Create(std::move(weights));
  std::vector<Query> queries(static_cast<std::size_t>(rounds), q);
  return AuditScenario{
      .pair = NeighborPair{.base = Database::FromElements(elements),
                           .extra = extra},
      .adversary = FixedQueries(std::move(queries)),
      .threshold = static_cast<double>(size) + offset};
}

AuditScenario NearThresholdScenario(std::int64_t rounds,
                                    std::int64_t block_size, double cap) {
  std::vector<ElementId> elements;
  for (std::int64_t x = 1; x <= rounds * block_size; ++x) {
    elements.push_back(MakeElement(x));
  }
  const ElementId extra = MakeElement(0);
  DeterministicAdversary adversary{
      .next_query =
          [block_size, rounds, extra](std::span<const Answer> answers) {
            const std::int64_t block = CountTops(Transcript(
                                           answers.begin(), answers.end())) %
                                       rounds;
            std::map<ElementId, double> weights{{extra, 1.0}};
            for (std::int64_t j = 1; j <= block_size; ++j) {
              weights[MakeElement(block * block_size + j)] = 1.0;
            }
            return *Query::Create(std::move(weights));
          },
      .rounds = rounds};
  return AuditScenario{
      .pair = NeighborPair{.base = Database::FromElements(elements),
                           .extra = extra},
      .adversary = std::move(adversary),
      .threshold = static_cast<double>(block_size) + cap};
}

}  // namespace dpsvt
