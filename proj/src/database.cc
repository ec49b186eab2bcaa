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

#include "dpsvt/database.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsvt {

Database Database::FromElements(std::span<const ElementId> elements) {
  Database db;
  for (ElementId x : elements) {
    ++db.counts_[x];
    ++db.size_;
  }
  return db;
}

absl::Status Database::Add(ElementId x, std::int64_t multiplicity) {
  if (multiplicity < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("multiplicity must be >= 1, got ", multiplicity));
  }
  counts_[x] += multiplicity;
  size_ += multiplicity;
  return absl::OkStatus();
}

void Database::RemoveAll(ElementId x) {
  auto it = counts_.find(x);
  if (it == counts_.end()) return;
  size_ -= it->second;
  counts_.erase(it);
}

std::int64_t Database::multiplicity(ElementId x) const {
  auto it = counts_.find(x);
  return it == counts_.end() ? 0 : it->second;
}

absl::StatusOr<Query> Query::Create(std::map<ElementId, double> weights) {
  for (const auto& [x, w] : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("query weight of element ", ElementValue(x),
                       " must lie in [0, 1], got ", w));
    }
  }
  return Query(std::move(weights));
}

Query Query::Point(ElementId x) { return Query({{x, 1.0}}); }

double Query::weight(ElementId x) const {
  auto it = weights_.find(x);
  return it == weights_.end() ? 0.0 : it->second;
}

double Query::Evaluate(const Database& db) const {
  double total = 0.0;
  // Walk whichever side is smaller; both walks visit elements in id order.
  if (weights_.size() <= db.distinct_size()) {
    for (const auto& [x, w] : weights_) {
      if (w > 0) total += w * static_cast<double>(db.multiplicity(x));
    }
  } else {
    for (const auto& [x, count] : db.counts()) {
      const double w = weight(x);
      if (w > 0) total += w * static_cast<double>(count);
    }
  }
  return total;
}

}  // namespace dpsvt
