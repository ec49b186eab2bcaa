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

#include <cmath>
#include <cstdint>
#include <vector>

#include "dpsvt/above_threshold.h"
#include "dpsvt/database.h"
#include "dpsvt/debug_trace.h"
#include "dpsvt/threshold_monitor.h"
#include "gtest/gtest.h"
#include "properties.h"

namespace dpsvt {
namespace {

const ElementId a = MakeElement(1);
const ElementId b = MakeElement(2);

Database Aab() { return Database::FromElements(std::vector{a, a, b}); }

Query Q(std::map<ElementId, double> w) { return *Query::Create(std::move(w)); }

TEST(DatabaseTest, MultisetBasics) {
  Database db = Aab();
  EXPECT_EQ(db.size(), 3);
  EXPECT_EQ(db.distinct_size(), 2u);
  EXPECT_EQ(db.multiplicity(a), 2);
  EXPECT_EQ(db.multiplicity(MakeElement(9)), 0);
  EXPECT_FALSE(db.Add(a, 0).ok());
  ASSERT_TRUE(db.Add(a, 3).ok());
  EXPECT_EQ(db.multiplicity(a), 5);
  db.RemoveAll(a);
  EXPECT_FALSE(db.contains(a));
  EXPECT_EQ(db.size(), 1);
  db.RemoveAll(a);
  EXPECT_EQ(db.size(), 1);
}

TEST(QueryTest, WeightsMustLieInUnitInterval) {
  EXPECT_FALSE(Query::Create({{a, 1.5}}).ok());
  EXPECT_FALSE(Query::Create({{a, -0.1}}).ok());
  EXPECT_FALSE(Query::Create({{a, std::nan("")}}).ok());
  Query q = Q({{a, 0.5}});
  EXPECT_EQ(q.weight(a), 0.5);
  EXPECT_EQ(q.weight(b), 0.0);
  EXPECT_EQ(q.Evaluate(Aab()), 1.0);
  EXPECT_EQ(Query::Point(b).Evaluate(Aab()), 1.0);
  EXPECT_EQ(Q({{a, 1}, {b, 1}}).Evaluate(Aab()), 3.0);
}

TEST(AboveThresholdTest, NoisyThreshold) {
  auto at = AboveThreshold::Create(Aab(), 1.0, 10, NoiseSource::Scripted({0.0}));
  ASSERT_TRUE(at.ok());
  EXPECT_EQ(at->noisy_threshold(), 10.0);
  at = AboveThreshold::Create(Aab(), 1.0, 10, NoiseSource::Scripted({-1.5}));
  EXPECT_EQ(at->noisy_threshold(), 8.5);
  EXPECT_FALSE(
      AboveThreshold::Create(Aab(), 0.0, 10, NoiseSource::Scripted({0})).ok());
}

TEST(AboveThresholdTest, HaltsAtFirstTop) {
  auto at = AboveThreshold::Create(Database(), 1.0, 5,
                                   NoiseSource::Scripted({0, 0, 0, 0}));
  EXPECT_EQ(*at->StepValue(3), Answer::kBot);
  EXPECT_FALSE(at->halted());
  EXPECT_EQ(*at->StepValue(7), Answer::kTop);
  EXPECT_TRUE(at->halted());
  EXPECT_EQ(at->StepValue(0).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AboveThresholdTest, TieIsTop) {
  auto at = AboveThreshold::Create(Database(), 1.0, 5,
                                   NoiseSource::Scripted({0, 0}));
  EXPECT_EQ(*at->StepValue(5), Answer::kTop);
}

TEST(ThresholdMonitorTest, CapExamples) {
  MonitorConfig c{.epsilon = 1, .delta = std::exp(-std::exp(1.0)), .threshold = 0, .budget = 1};
  auto m = ThresholdMonitor::Create(Database(), c, NoiseSource::Scripted({}));
  ASSERT_TRUE(m.ok());
  EXPECT_NEAR(m->delta_cap(), std::exp(1.0), 1e-12);
  c = {.epsilon = 0.5, .delta = 0.01, .threshold = 0, .budget = 1};
  EXPECT_NEAR(ThresholdMonitor::Create(Database(), c, NoiseSource::Scripted({}))
                  ->delta_cap(),
              20.44996562367072, 1e-10);
  c = {.epsilon = 1, .delta = std::exp(-1.0), .threshold = 0, .budget = 1};
  EXPECT_FALSE(
      ThresholdMonitor::Create(Database(), c, NoiseSource::Scripted({})).ok());
  c = {.epsilon = 1, .delta = 1e-3, .threshold = 0, .budget = 0.5};
  EXPECT_FALSE(
      ThresholdMonitor::Create(Database(), c, NoiseSource::Scripted({})).ok());
}

TEST(ThresholdMonitorTest, TopDeletesThenBot) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 2, .budget = 1};
  auto m = ThresholdMonitor::Create(Aab(), c, NoiseSource::Scripted({0, 0, 0, 0}));
  ASSERT_TRUE(m.ok());
  const Query q = Q({{a, 1}, {b, 1}});
  EXPECT_EQ(*m->Step(q), Answer::kTop);
  EXPECT_EQ(m->counter(a), 1.0);
  EXPECT_EQ(m->counter(b), 1.0);
  EXPECT_TRUE(m->live().empty());
  EXPECT_EQ(*m->Step(q), Answer::kBot);
  EXPECT_EQ(m->round(), 3);
}

TEST(ThresholdMonitorTest, BotLeavesCountersAlone) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 2, .budget = 1};
  auto m = ThresholdMonitor::Create(Aab(), c, NoiseSource::Scripted({0, 0}));
  EXPECT_EQ(*m->Step(Q({{a, 0.5}})), Answer::kBot);
  EXPECT_TRUE(m->counters().empty());
  EXPECT_EQ(m->live(), Aab());
}

TEST(ThresholdMonitorTest, CountersTrackAbsentElements) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 0, .budget = 2};
  auto m = ThresholdMonitor::Create(Aab(), c, NoiseSource::Scripted({0, 0}));
  const ElementId absent = MakeElement(77);
  EXPECT_EQ(*m->Step(Q({{a, 1}, {absent, 0.25}})), Answer::kTop);
  EXPECT_EQ(m->counter(absent), 0.25);
  EXPECT_EQ(m->live(), Aab());
}

TEST(ThresholdMonitorTest, VIsCappedAndDrawnAfterW) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 100, .budget = 1};
  auto m = TracingThresholdMonitor::Create(Aab(), c,
                                           NoiseSource::Scripted({3, 1e9}));
  auto t = m->Step(Q({{a, 1}}));
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->w, 3);
  EXPECT_EQ(t->v, 1e9);
  EXPECT_EQ(t->v_capped, m->monitor().delta_cap());
  EXPECT_EQ(t->true_value, 2);
  EXPECT_DOUBLE_EQ(t->noisy_value, 5 + m->monitor().delta_cap());
}

TEST(ThresholdMonitorTest, TieIsTop) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 3, .budget = 5};
  auto m = ThresholdMonitor::Create(Aab(), c, NoiseSource::Scripted({0.5, -0.5}));
  EXPECT_EQ(*m->Step(Q({{a, 1}, {b, 1}})), Answer::kTop);
}

TEST(ThresholdMonitorTest, RunExamples) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = 2, .budget = 1};
  EXPECT_TRUE(RunThresholdMonitor(Aab(), c, {}, NoiseSource::Scripted({}))->empty());
  const std::vector<Query> qs(2, Q({{a, 1}, {b, 1}}));
  EXPECT_EQ(*RunThresholdMonitor(Aab(), c, qs, NoiseSource::Scripted({0, 0, 0, 0})),
            (Transcript{Answer::kTop, Answer::kBot}));
  EXPECT_FALSE(RunThresholdMonitor(Aab(), c, qs, NoiseSource::Scripted({0, 0, 0})).ok());
}

TEST(ThresholdMonitorTest, HeavyDatabaseAnswersTop) {
  MonitorConfig c{.epsilon = 1, .delta = 1e-6, .threshold = 100, .budget = 1};
  const Database db = Database::FromElements(std::vector<ElementId>(200, a));
  const std::vector<Query> qs(50, Query::Point(a));
  int with_top = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    with_top += CountTops(*RunThresholdMonitor(db, c, qs, NoiseSource::Seeded(seed))) > 0;
  }
  EXPECT_GE(with_top, 990);
}

TEST(ThresholdMonitorTest, TracingMatchesPlain) {
  testing::Gen gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Database db = gen.Db(30, 10);
    MonitorConfig c{.epsilon = 0.5, .delta = 1e-3, .threshold = gen.Real(0, 20), .budget = 2};
    auto plain = ThresholdMonitor::Create(db, c, NoiseSource::Seeded(trial));
    auto traced = TracingThresholdMonitor::Create(db, c, NoiseSource::Seeded(trial));
    for (int i = 0; i < 30; ++i) {
      const Query q = gen.RandomQuery(10, false);
      ASSERT_EQ(*plain->Step(q), traced->Step(q)->answer);
    }
  }
}

TEST(ThresholdMonitorPropertyTest, InvariantsHold) {
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    const std::string failure = testing::CheckMonitorInvariants(seed);
    ASSERT_EQ(failure, "");
  }
}

TEST(ThresholdMonitorPropertyTest, ScriptedMarginInequalities) {
  // With |w| <= W and v in [-V, cap], Top implies f >= t - W - cap and Bot
  // implies f < t + W + V.
  testing::Gen gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    MonitorConfig c{.epsilon = 1, .delta = 1e-3, .threshold = gen.Real(0, 30), .budget = 3};
    const double W = gen.Real(0, 10), V = gen.Real(0, 10);
    std::vector<double> script;
    for (int i = 0; i < 40; ++i) {
      script.push_back(gen.Real(-W, W));
      script.push_back(gen.Real(-V, 30));
    }
    auto m = TracingThresholdMonitor::Create(gen.Db(50, 10), c,
                                             NoiseSource::Scripted(script));
    const double cap = m->monitor().delta_cap();
    for (int i = 0; i < 40; ++i) {
      auto t = m->Step(gen.RandomQuery(10, false));
      if (t->answer == Answer::kTop) {
        ASSERT_GE(t->true_value, c.threshold - W - cap);
      } else {
        ASSERT_LT(t->true_value, c.threshold + W + V);
      }
    }
  }
}

}  // namespace
}  // namespace dpsvt
