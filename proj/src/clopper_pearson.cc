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

#include "dpsvt/clopper_pearson.h"

#include <cmath>

#include "boost/math/special_functions/beta.hpp"

namespace dpsvt {

ConfidenceInterval ClopperPearson(std::int64_t hits, std::int64_t trials,
                                  double confidence) {
  if (trials <= 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const double x = static_cast<double>(hits);
  const double n = static_cast<double>(trials);
  ConfidenceInterval ci;
  ci.lower = hits == 0 ? 0.0
                       : boost::math::ibeta_inv(x, n - x + 1, alpha / 2);
  ci.upper = hits == trials
                 ? 1.0
                 : boost::math::ibeta_inv(x + 1, n - x, 1 - alpha / 2);
  return ci;
}

ProportionEstimate EstimateProportion(std::int64_t hits, std::int64_t trials,
                                      double confidence) {
  ProportionEstimate e;
  e.hits = hits;
  e.trials = trials;
  e.estimate = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
  e.interval = ClopperPearson(hits, trials, confidence);
  e.standard_error =
      trials > 0 ? std::sqrt(e.estimate * (1 - e.estimate) / trials) : 0.0;
  return e;
}

}  // namespace dpsvt
