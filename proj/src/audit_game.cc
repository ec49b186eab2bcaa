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

#include "dpsvt/game.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "dpsvt/noise.h"
#include "dpsvt/parallel.h"

namespace dpsvt {

absl::Status GameRound::Validate() const {
  if (!(p >= 0 && p <= 0.5 && q >= p / 4 && q <= 1 - p && gamma >= 0 &&
        gamma <= 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid game round p=", p, " q=", q, " gamma=", gamma));
  }
  return absl::OkStatus();
}

double GameReward(std::span<const GameOutcome> history, double budget) {
  double spent = 0;
  double reward = 0;
  for (const GameOutcome& o : history) {
    if (o.x == 2) spent += o.round.gamma;
    if (spent > budget) break;
    if (o.x == 1) reward += o.round.gamma;
  }
  return reward;
}

double GameTailBound(double lambda, double budget) {
  return std::exp(-lambda / 5.0 + 3.0 * (budget + 1.0));
}

absl::StatusOr<std::vector<GameTail>> RunGame(const GameStrategy& strategy,
                                              std::int64_t rounds,
                                              double budget,
                                              std::span<const double> lambdas,
                                              std::int64_t trials,
                                              std::uint64_t master_seed) {
  if (rounds < 1 || trials < 1) {
    return absl::InvalidArgumentError("rounds and trials must be >= 1");
  }
  const std::int64_t chunks = ChunkCount(trials);
  std::vector<std::vector<std::int64_t>> partial(
      static_cast<std::size_t>(chunks),
      std::vector<std::int64_t>(lambdas.size(), 0));
  absl::Status status = ParallelChunks(
      trials,
      [&](std::int64_t begin, std::int64_t end,
          std::int64_t chunk) -> absl::Status {
        auto& exceed = partial[static_cast<std::size_t>(chunk)];
        std::vector<GameOutcome> history;
        history.reserve(static_cast<std::size_t>(rounds));
        for (std::int64_t trial = begin; trial < end; ++trial) {
          NoiseSource rng = NoiseSource::ForTrial(
              master_seed, static_cast<std::uint64_t>(trial));
          history.clear();
          GameView view;
          for (std::int64_t i = 0; i < rounds; ++i) {
            view.history = history;
            const GameRound round = strategy(view);
            if (absl::Status s = round.Validate(); !s.ok()) return s;
            absl::StatusOr<double> u = rng.NextUniform();
            if (!u.ok()) return u.status();
            const int x = *u < round.p ? 1 : (*u < round.p + round.q ? 2 : 0);
            history.push_back(GameOutcome{round, x});
            if (x == 1) view.earned += round.gamma;
            if (x == 2) view.spent += round.gamma;
          }
          const double w = GameReward(history, budget);
          for (std::size_t l = 0; l < lambdas.size(); ++l) {
            exceed[l] += w > lambdas[l];
          }
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  std::vector<GameTail> tails;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    GameTail tail;
    tail.lambda = lambdas[l];
    tail.trials = trials;
    for (const auto& exceed : partial) tail.exceed += exceed[l];
    tail.probability = static_cast<double>(tail.exceed) / trials;
    tail.standard_error =
        std::sqrt(tail.probability * (1 - tail.probability) / trials);
    tail.bound = GameTailBound(lambdas[l], budget);
    tails.push_back(tail);
  }
  return tails;
}

GameStrategy ConstantStrategy(double p, double q, double gamma) {
  return [=](const GameView&) { return GameRound{p, q, gamma}; };
}

GameStrategy EscalatingGammaStrategy(std::int64_t rounds) {
  return [rounds](const GameView& view) {
    const double gamma =
        std::min(1.0, static_cast<double>(view.history.size() + 1) / rounds);
    return GameRound{0.5, 0.125, gamma};
  };
}

GameStrategy BudgetAwareStrategy(double budget) {
  return [budget](const GameView& view) {
    const double gamma = budget - view.spent >= 1.0 ? 1.0 : 0.05;
    return GameRound{0.5, 0.125, gamma};
  };
}

GameStrategy DoubleOrNothingStrategy() {
  return [](const GameView& view) {
    if (view.history.empty()) return GameRound{0.5, 0.125, 0.125};
    const GameOutcome& last = view.history.back();
    double gamma = last.round.gamma;
    if (last.x == 1) gamma = std::min(1.0, 2 * gamma);
    if (last.x == 2) gamma = 0.125;
    return GameRound{0.5, 0.125, gamma};
  };
}

}  // namespace dpsvt
