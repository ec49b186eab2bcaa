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

#ifndef DPSVT_DATABASE_H_
#define DPSVT_DATABASE_H_

#include <cstdint>
#include <map>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsvt/types.h"

namespace dpsvt {

// A finite multiset of domain elements. Iteration is ordered by element id so
// that floating-point sums over a database are reproducible.
class Database {
 public:
  Database() = default;

  static Database FromElements(std::span<const ElementId> elements);

  absl::Status Add(ElementId x, std::int64_t multiplicity = 1);
  // Removes every copy of x. No-op when x is absent.
  void RemoveAll(ElementId x);

  std::int64_t multiplicity(ElementId x) const;
  bool contains(ElementId x) const { return counts_.contains(x); }
  // Total number of rows n, counting multiplicity.
  std::int64_t size() const { return size_; }
  std::size_t distinct_size() const { return counts_.size(); }
  bool empty() const { return size_ == 0; }

  const std::map<ElementId, std::int64_t>& counts() const { return counts_; }

  bool operator==(const Database&) const = default;

 private:
  std::map<ElementId, std::int64_t> counts_;
  std::int64_t size_ = 0;
};

// A linear (counting) query f : X -> [0, 1]. Elements without an explicit
// weight have weight exactly 0.
class Query {
 public:
  Query() = default;

  static absl::StatusOr<Query> Create(std::map<ElementId, double> weights);
  // The indicator query f_x(y) = 1{y = x}.
  static Query Point(ElementId x);

  double weight(ElementId x) const;
  const std::map<ElementId, double>& weights() const { return weights_; }

  // f(S) = sum over rows of S of f(x), counting multiplicity.
  double Evaluate(const Database& db) const;

 private:
  explicit Query(std::map<ElementId, double> weights)
      : weights_(std::move(weights)) {}

  std::map<ElementId, double> weights_;
};

}  // namespace dpsvt

#endif  // DPSVT_DATABASE_H_
