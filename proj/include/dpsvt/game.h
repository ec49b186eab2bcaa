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

#ifndef DPSVT_GAME_H_
#define DPSVT_GAME_H_

// The m-round budget game. Each round the strategy picks (p, q, gamma) with
// 0 <= p <= 1/2, p/4 <= q <= 1 - p and gamma in [0, 1]; then X in {0, 1, 2}
// is drawn with Pr[X = 1] = p and Pr[X = 2] = q. Rounds with X = 2 spend
// gamma of the budget k; rounds with X = 1 earn gamma while the spent budget
// (this round included) is at most k:
//
//   W(k) = sum_i 1{X_i = 1} gamma_i 1{sum_{j <= i} 1{X_j = 2} gamma_j <= k}.
//
// For every strategy and k >= 0, Pr[W(k) > lambda] <= exp(-lambda/5 + 3(k+1)).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpsvt {

struct GameRound {
  double p = 0;
  double q = 0;
  double gamma = 0;

  absl::Status Validate() const;
};

struct GameOutcome {
  GameRound round;
  int x = 0;
};

// What a strategy sees before choosing round history.size() + 1.
struct GameView {
  std::span<const GameOutcome> history;
  // Sums of gamma over rounds with X = 2 and X = 1 so far.
  double spent = 0;
  double earned = 0;
};

using GameStrategy = std::function<GameRound(const GameView&)>;

// W(k) for one completed history.
double GameReward(std::span<const GameOutcome> history, double budget);

double GameTailBound(double lambda, double budget);

struct GameTail {
  double lambda = 0;
  std::int64_t exceed = 0;
  std::int64_t trials = 0;
  double probability = 0;
  double standard_error = 0;
  double bound = 0;
};

absl::StatusOr<std::vector<GameTail>> RunGame(const GameStrategy& strategy,
                                              std::int64_t rounds,
                                              double budget,
                                              std::span<const double> lambdas,
                                              std::int64_t trials,
                                              std::uint64_t master_seed);

// Strategies used by the audits.
GameStrategy ConstantStrategy(double p, double q, double gamma);
// gamma_i = i / rounds with the extreme p = 1/2, q = p/4.
GameStrategy EscalatingGammaStrategy(std::int64_t rounds);
// Full weight while at least one unit of budget remains, then tiny weights
// to stretch what is left.
GameStrategy BudgetAwareStrategy(double budget);
// Doubles gamma after every reward and resets it after every spend.
GameStrategy DoubleOrNothingStrategy();

}  // namespace dpsvt

#endif  // DPSVT_GAME_H_
