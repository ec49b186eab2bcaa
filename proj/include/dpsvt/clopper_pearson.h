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

#ifndef DPSVT_CLOPPER_PEARSON_H_
#define DPSVT_CLOPPER_PEARSON_H_

#include <cstdint>

namespace dpsvt {

struct ConfidenceInterval {
  double lower = 0;
  double upper = 1;
};

// Exact two-sided binomial interval for hits out of trials.
ConfidenceInterval ClopperPearson(std::int64_t hits, std::int64_t trials,
                                  double confidence);

struct ProportionEstimate {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double estimate = 0;
  ConfidenceInterval interval;
  // sqrt(p (1 - p) / trials).
  double standard_error = 0;
};

ProportionEstimate EstimateProportion(std::int64_t hits, std::int64_t trials,
                                      double confidence);

}  // namespace dpsvt

#endif  // DPSVT_CLOPPER_PEARSON_H_
