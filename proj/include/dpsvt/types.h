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

#ifndef DPSVT_TYPES_H_
#define DPSVT_TYPES_H_

#include <cstdint>
#include <string>
#include <vector>

namespace dpsvt {

// Identifier of a data domain element. Elements are opaque integers so that
// queries, databases and user snapshots can share cheap hashing and ordering.
enum class ElementId : std::int64_t {};

constexpr ElementId MakeElement(std::int64_t id) {
  return static_cast<ElementId>(id);
}
constexpr std::int64_t ElementValue(ElementId x) {
  return static_cast<std::int64_t>(x);
}

// The only thing a sparse-vector mechanism releases per round.
enum class Answer { kBot, kTop };

using Transcript = std::vector<Answer>;

inline const char* AnswerName(Answer a) {
  return a == Answer::kTop ? "top" : "bot";
}

int CountTops(const Transcript& transcript);

}  // namespace dpsvt

#endif  // DPSVT_TYPES_H_
