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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "dpsvt/evolving.h"
#include "dpsvt/heavy_hitters.h"
#include "gtest/gtest.h"
#include "properties.h"

namespace dpsvt {
namespace {

const ElementId a = MakeElement(1);
const ElementId b = MakeElement(2);

EvolvingConfig Config(std::int64_t users, double t, double k) {
  return {.epsilon = 1, .delta = 1e-3, .threshold = t, .budget = k,
          .scale1 = 20, .scale2 = 7, .users = users};
}

UserSnapshot Distinct(std::int64_t users, std::int64_t offset) {
  UserSnapshot s;
  for (std::int64_t j = 0; j < users; ++j) s.push_back(MakeElement(offset + j));
  return s;
}

TEST(EvolvingTest, CreateValidates) {
  auto m = ThresholdMonitorEvolving::Create(Config(3, 1, 1), NoiseSource::Scripted({}));
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->counters(), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(m->round(), 1);
  EvolvingConfig bad = Config(3, 1, 1);
  bad.scale2 = bad.scale1;
  EXPECT_FALSE(ThresholdMonitorEvolving::Create(bad, NoiseSource::Scripted({})).ok());
  EXPECT_FALSE(
      ThresholdMonitorEvolving::Create(Config(0, 1, 1), NoiseSource::Scripted({})).ok());
}

TEST(EvolvingTest, BudgetExhaustion) {
  auto m = ThresholdMonitorEvolving::Create(Config(5, 3, 1),
                                            NoiseSource::Scripted({0, 0, 0, 0}));
  const UserSnapshot all_a(5, a);
  EXPECT_EQ(*m->Step(all_a, Query::Point(a)), Answer::kTop);
  EXPECT_EQ(m->counters(), std::vector<double>(5, 1.0));
  EXPECT_EQ(*m->Step(all_a, Query::Point(a)), Answer::kBot);
}

TEST(EvolvingTest, SingleHolderBelowThreshold) {
  auto m = ThresholdMonitorEvolving::Create(Config(5, 3, 1), NoiseSource::Scripted({0, 0}));
  EXPECT_EQ(*m->Step(Distinct(5, 1), Query::Point(a)), Answer::kBot);
  EXPECT_EQ(m->counters(), std::vector<double>(5, 0.0));
}

TEST(EvolvingTest, UserExcludedAfterBudget) {
  auto m = ThresholdMonitorEvolving::Create(
      Config(3, 1, 2), NoiseSource::Scripted({0, 0, 0, 0, 0, 0}));
  const UserSnapshot s{a, b, b};
  EXPECT_EQ(*m->Step(s, Query::Point(a)), Answer::kTop);
  EXPECT_EQ(*m->Step(s, Query::Point(a)), Answer::kTop);
  EXPECT_EQ(m->counters()[0], 2.0);
  EXPECT_EQ(*m->Step(s, Query::Point(a)), Answer::kBot);
}

TEST(EvolvingTest, ExhaustedUsersStillCharged) {
  auto m = ThresholdMonitorEvolving::Create(
      Config(3, 1, 1), NoiseSource::Scripted({0, 0, 0, 0}));
  EXPECT_EQ(*m->Step(UserSnapshot{a, a, b}, Query::Point(a)), Answer::kTop);
  EXPECT_EQ(*m->Step(UserSnapshot{a, b, b}, Query::Point(b)), Answer::kTop);
  EXPECT_EQ(m->counters(), (std::vector<double>{1, 2, 1}));
}

TEST(EvolvingTest, LengthMismatch) {
  auto m = ThresholdMonitorEvolving::Create(Config(3, 1, 1), NoiseSource::Scripted({0, 0}));
  EXPECT_FALSE(m->Step(UserSnapshot{a}, Query::Point(a)).ok());
  EXPECT_FALSE(m->StepPoint(std::vector<std::int64_t>{5}).ok());
}

TEST(EvolvingTest, StepPointMatchesStep) {
  testing::Gen gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t users = gen.Int(1, 30);
    const double k = static_cast<double>(gen.Int(1, 3));
    EvolvingConfig c = Config(users, gen.Real(0, 8), k);
    const auto script = gen.Script(40, 10);
    auto slow = ThresholdMonitorEvolving::Create(c, NoiseSource::Scripted(script));
    auto fast = ThresholdMonitorEvolving::Create(c, NoiseSource::Scripted(script));
    for (int i = 0; i < 40; ++i) {
      const UserSnapshot s = gen.Snapshot(users, 6);
      const ElementId x = MakeElement(gen.Int(1, 7));
      std::vector<std::int64_t> holders;
      for (std::int64_t j = 0; j < users; ++j) {
        if (s[j] == x) holders.push_back(j);
      }
      ASSERT_EQ(*slow->Step(s, Query::Point(x)), *fast->StepPoint(holders));
      ASSERT_EQ(slow->counters(), fast->counters());
    }
  }
}

TEST(EvolvingTest, ExhaustedUsersCannotInfluenceAnswers) {
  testing::Gen gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t users = gen.Int(2, 20);
    EvolvingConfig c = Config(users, gen.Real(0, 6), static_cast<double>(gen.Int(1, 2)));
    const auto script = gen.Script(30, 6);
    auto m1 = ThresholdMonitorEvolving::Create(c, NoiseSource::Scripted(script));
    auto m2 = ThresholdMonitorEvolving::Create(c, NoiseSource::Scripted(script));
    for (int i = 0; i < 30; ++i) {
      UserSnapshot s1 = gen.Snapshot(users, 4);
      UserSnapshot s2 = s1;
      // Scramble every exhausted user's input in the second run.
      for (std::int64_t j = 0; j < users; ++j) {
        if (m2->counters()[j] >= c.budget) s2[j] = MakeElement(gen.Int(1, 4));
      }
      const Query q = gen.RandomQuery(4, true);
      ASSERT_EQ(*m1->Step(s1, q), *m2->Step(s2, q));
    }
  }
}

TEST(EvolvingTest, BotRoundsMutateNothing) {
  auto m = ThresholdMonitorEvolving::Create(Config(4, 100, 1),
                                            NoiseSource::Scripted({0, 0, 0, 0}));
  EXPECT_EQ(*m->Step(UserSnapshot(4, a), Query::Point(a)), Answer::kBot);
  EXPECT_EQ(*m->Step(UserSnapshot(4, b), Query::Point(b)), Answer::kBot);
  EXPECT_EQ(m->counters(), std::vector<double>(4, 0.0));
}

TEST(EvolvingTest, StaticEquivalence) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    ASSERT_EQ(testing::CheckStaticEvolvingEquivalence(seed), "");
  }
}

TEST(HeavyHittersTest, OneElementOverThreshold) {
  UserSnapshot s(6, a);
  s.insert(s.end(), 4, b);
  auto hh = ShiftingHeavyHitters::Create(Config(10, 5, 1), NoiseSource::Scripted({0, 0, 0, 0}));
  auto r = hh->Step(s);
  EXPECT_EQ(r->step, 1);
  EXPECT_EQ(r->identified, std::vector<ElementId>{a});
}

TEST(HeavyHittersTest, AllDistinctReportsNothing) {
  std::vector<double> zeros(20, 0.0);
  auto hh = ShiftingHeavyHitters::Create(Config(10, 2, 1), NoiseSource::Scripted(zeros));
  EXPECT_TRUE(hh->Step(Distinct(10, 100))->identified.empty());
}

TEST(HeavyHittersTest, ShiftsWithTheData) {
  std::vector<double> zeros(8, 0.0);
  const std::vector<UserSnapshot> stream{{a, a, a, b}, {b, b, b, a}};
  auto reports = RunShiftingHeavyHitters(Config(4, 3, 2), stream, NoiseSource::Scripted(zeros));
  ASSERT_EQ(reports->size(), 2u);
  EXPECT_EQ((*reports)[0].identified, std::vector<ElementId>{a});
  EXPECT_EQ((*reports)[1].identified, std::vector<ElementId>{b});
  EXPECT_TRUE(RunShiftingHeavyHitters(Config(4, 3, 2), {}, NoiseSource::Scripted({}))->empty());
}

TEST(HeavyHittersTest, ReportsOnlyHeldElements) {
  testing::Gen gen(8);
  EvolvingConfig c = Config(12, -50, 1e9);
  auto hh = ShiftingHeavyHitters::Create(c, NoiseSource::Seeded(1));
  for (int i = 0; i < 50; ++i) {
    const UserSnapshot s = gen.Snapshot(12, 30);
    auto r = hh->Step(s);
    for (ElementId x : r->identified) {
      ASSERT_NE(std::find(s.begin(), s.end(), x), s.end());
    }
  }
}

TEST(HeavyHittersTest, CandidatesInFirstAppearanceOrder) {
  const Candidates c = CollectCandidates(UserSnapshot{b, a, b, MakeElement(9)});
  EXPECT_EQ(c.elements, (std::vector<ElementId>{b, a, MakeElement(9)}));
  EXPECT_EQ(c.holders[0], (std::vector<std::int64_t>{0, 2}));
}

}  // namespace
}  // namespace dpsvt
