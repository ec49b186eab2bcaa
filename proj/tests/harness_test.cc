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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "dpsvt/above_threshold.h"
#include "dpsvt/baseline.h"
#include "dpsvt/experiment.h"
#include "dpsvt/heavy_hitters.h"
#include "dpsvt/stream.h"
#include "gtest/gtest.h"
#include "generators.h"

namespace dpsvt {
namespace {

TEST(Example1Test, ShapeFor4096) {
  auto shape = Example1ShapeFor(4096);
  ASSERT_TRUE(shape.ok());
  EXPECT_EQ(shape->a_size, 12);
  EXPECT_EQ(shape->b_size, 8);
  EXPECT_EQ(shape->c_size, 16);
  EXPECT_EQ(shape->a_sets, 342);
  EXPECT_EQ(shape->b_sets, 512);
  EXPECT_EQ(shape->c_sets, 256);
  EXPECT_FALSE(Example1ShapeFor(8).ok());
  EXPECT_FALSE(Example1ShapeFor(1).ok());
}

TEST(Example1Test, StructureAt4096) {
  auto stream = GenerateExample1(4096, 5);
  ASSERT_TRUE(stream.ok());
  EXPECT_EQ(stream->snapshots.size(), 342u + 512u + 256u);
  EXPECT_EQ(stream->planted.size(), stream->snapshots.size());
  std::map<Tier, std::vector<std::int64_t>> covered;
  std::set<ElementId> seen_heavy;
  std::set<ElementId> seen_all;
  for (std::size_t s = 0; s < stream->snapshots.size(); ++s) {
    const UserSnapshot& snap = stream->snapshots[s];
    ASSERT_EQ(std::ssize(snap), 4096);
    const PlantedHeavy& p = stream->planted[s];
    EXPECT_EQ(p.step, static_cast<std::int64_t>(s) + 1);
    EXPECT_TRUE(seen_heavy.insert(p.element).second);
    std::int64_t holders = 0;
    for (std::int64_t j = 0; j < 4096; ++j) {
      if (snap[j] == p.element) {
        ++holders;
        covered[p.tier].push_back(j);
      } else {
        // Fillers never repeat anywhere in the stream.
        ASSERT_TRUE(seen_all.insert(snap[j]).second);
      }
    }
    EXPECT_EQ(holders, p.weight);
  }
  // Each tier partitions the users exactly once.
  for (auto& [tier, users] : covered) {
    std::sort(users.begin(), users.end());
    std::vector<std::int64_t> all(4096);
    for (int j = 0; j < 4096; ++j) all[j] = j;
    EXPECT_EQ(users, all) << TierName(tier);
  }
  std::map<Tier, std::map<std::int64_t, int>> sizes;
  for (const PlantedHeavy& p : stream->planted) ++sizes[p.tier][p.weight];
  EXPECT_EQ(sizes[Tier::kA], (std::map<std::int64_t, int>{{4, 1}, {12, 341}}));
  EXPECT_EQ(sizes[Tier::kB], (std::map<std::int64_t, int>{{8, 512}}));
  EXPECT_EQ(sizes[Tier::kC], (std::map<std::int64_t, int>{{16, 256}}));
  const auto participation = HeavyParticipation(*stream, 2);
  EXPECT_TRUE(std::all_of(participation.begin(), participation.end(),
                          [](std::int64_t c) { return c == 3; }));
}

TEST(Example1Test, SeedDeterminesStream) {
  auto x = GenerateExample1(256, 1);
  auto y = GenerateExample1(256, 1);
  auto z = GenerateExample1(256, 2);
  EXPECT_EQ(x->snapshots, y->snapshots);
  EXPECT_NE(x->snapshots, z->snapshots);
}

TEST(KStarTest, Example1ResolvesToThree) {
  auto stream = GenerateExample1(512, 3);
  auto r = ResolveKStar(*stream, [](std::int64_t) -> absl::StatusOr<double> { return 2.0; });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->k, 3);
  EXPECT_EQ(r->max_participation, 3);
}

TEST(KStarTest, GrowingHeavyWeight) {
  auto stream = ConstantStream(4, MakeElement(1), 10);
  // Every step is heavy while the bar stays at most 4.
  auto r = ResolveKStar(*stream, [](std::int64_t k) -> absl::StatusOr<double> {
    return static_cast<double>(k);
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->k, 5);
  EXPECT_EQ(r->max_participation, 0);
  auto never = ResolveKStar(
      *stream, [](std::int64_t) -> absl::StatusOr<double> { return 1.0; }, 4);
  EXPECT_FALSE(never.ok());
}

TEST(StreamIoTest, RoundTrip) {
  auto stream = GenerateExample1(64, 9);
  std::stringstream buffer;
  ASSERT_TRUE(WriteStream(*stream, buffer).ok());
  auto back = ReadStream(buffer);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->users, 64);
  EXPECT_EQ(back->snapshots, stream->snapshots);
}

TEST(StreamIoTest, RejectsBadRecords) {
  std::stringstream bad_step(R"({"step": 2, "inputs": [1]})");
  EXPECT_FALSE(ReadStream(bad_step).ok());
  std::stringstream ragged("{\"step\":1,\"inputs\":[1,2]}\n{\"step\":2,\"inputs\":[1]}\n");
  EXPECT_FALSE(ReadStream(ragged).ok());
  std::stringstream junk("not json\n");
  EXPECT_FALSE(ReadStream(junk).ok());
  std::stringstream empty("");
  EXPECT_TRUE(ReadStream(empty)->snapshots.empty());
}

TEST(QueryIoTest, RoundTripAndErrors) {
  std::vector<Query> qs{*Query::Create({{MakeElement(3), 0.5}, {MakeElement(-2), 1}}),
                        Query()};
  std::stringstream buffer;
  ASSERT_TRUE(WriteQueries(qs, buffer).ok());
  auto back = ReadQueries(buffer);
  ASSERT_TRUE(back.ok());
  ASSERT_EQ(back->size(), 2u);
  EXPECT_EQ((*back)[0].weights(), qs[0].weights());
  EXPECT_TRUE((*back)[1].weights().empty());
  std::stringstream out_of_range(R"({"weights": {"1": 1.5}})");
  EXPECT_FALSE(ReadQueries(out_of_range).ok());
  std::stringstream bad_key(R"({"weights": {"x1": 0.5}})");
  EXPECT_FALSE(ReadQueries(bad_key).ok());
}

BaselineConfig Baseline(double t, std::int64_t c) {
  return {.target = {1.0, 1e-6}, .threshold = t, .max_restarts = c};
}

TEST(BaselineTest, InstanceEpsilon) {
  EXPECT_EQ(*BaselineInstanceEpsilon({1.0, 1e-6}, 1), 1.0);
  const double e = *BaselineInstanceEpsilon({1.0, 1e-6}, 256);
  EXPECT_GT(e, 1.0 / 256);
  EXPECT_NEAR(AdvancedComposition(e, 0, 256, 1e-6)->epsilon, 1.0, 1e-9);
  // Few restarts: the even split wins.
  EXPECT_EQ(*BaselineInstanceEpsilon({1.0, 1e-6}, 4), 0.25);
  EXPECT_FALSE(BaselineInstanceEpsilon({1.0, 1e-6}, 0).ok());
}

TEST(BaselineTest, ZeroQueries) {
  auto run = RunBaselineRestart(Database(), Baseline(1, 3), {}, NoiseSource::Scripted({0}));
  ASSERT_TRUE(run.ok());
  EXPECT_TRUE(run->transcript.empty());
  EXPECT_FALSE(run->halted);
  ASSERT_EQ(run->ledger.size(), 1u);
}

TEST(BaselineTest, SingleRestartIsAboveThreshold) {
  testing::Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto script = gen.Script(10, 10);
    const double t = gen.Real(0, 5);
    auto baseline = RestartBaseline::Create(Baseline(t, 1), NoiseSource::Scripted(script));
    auto plain = AboveThreshold::Create(Database(), 1.0, t, NoiseSource::Scripted(script));
    for (int i = 0; i < 10 && !plain->halted(); ++i) {
      const double v = gen.Real(0, 5);
      ASSERT_EQ(*baseline->StepValue(v), *plain->StepValue(v));
    }
    if (plain->halted()) {
      EXPECT_TRUE(baseline->exhausted());
      EXPECT_EQ(baseline->StepValue(0).status().code(),
                absl::StatusCode::kResourceExhausted);
    }
  }
}

TEST(BaselineTest, LedgerNeverExceedsBudget) {
  testing::Gen gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t c = gen.Int(1, 20);
    auto b = RestartBaseline::Create(Baseline(gen.Real(-2, 2), c), NoiseSource::Seeded(trial));
    std::int64_t answered_after_exhaustion = 0;
    for (int i = 0; i < 200; ++i) {
      const bool was_exhausted = b->exhausted();
      auto a = b->StepValue(gen.Real(0, 3));
      if (was_exhausted) answered_after_exhaustion += a.ok();
    }
    EXPECT_EQ(answered_after_exhaustion, 0);
    EXPECT_LE(b->tops(), c);
    EXPECT_LE(std::ssize(b->ledger()), c);
    for (const auto& e : b->ledger()) EXPECT_LE(e.epsilon_spent, 1.0 + 1e-9);
  }
}

TEST(BaselineTest, HaltMarker) {
  std::vector<Query> qs(5, Query());
  auto run = RunBaselineRestart(Database(), Baseline(-100, 2), qs,
                                NoiseSource::Scripted(std::vector<double>(20, 0)));
  ASSERT_TRUE(run.ok());
  EXPECT_EQ(run->transcript, (Transcript{Answer::kTop, Answer::kTop}));
  EXPECT_TRUE(run->halted);
  EXPECT_EQ(run->ledger.size(), 2u);
}

TEST(ExperimentConfigTest, Parse) {
  auto c = ParseExperimentConfig(R"({"mechanism": "tme_heavy_hitters", "epsilon": 1,
      "delta": 1e-6, "seed": 4, "k": "auto", "trials": 3,
      "stream": {"kind": "example1", "n": 256}})");
  ASSERT_TRUE(c.ok());
  EXPECT_FALSE(c->k.has_value());
  EXPECT_EQ(c->stream.users, 256);
  EXPECT_EQ(c->trials, 3);
  EXPECT_FALSE(ParseExperimentConfig(R"({"mechanism": "x", "epsilon": 1, "delta": 0.1,
      "seed": 1, "stream": {"kind": "example1"}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"mechanism": "tme_heavy_hitters", "epsilon": 1,
      "delta": 0.1, "stream": {"kind": "example1"}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"mechanism": "tme_heavy_hitters", "epsilon": 1,
      "delta": 0.1, "seed": 1, "typo": 2, "stream": {"kind": "example1"}})").ok());
  EXPECT_FALSE(ParseExperimentConfig("[1]").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"mechanism": "tme_heavy_hitters", "epsilon": 1,
      "delta": 0.1, "seed": 1, "stream": {"kind": "example1", "users": 256}})").ok());
}

ExperimentConfig Small(ExperimentMechanism m, std::int64_t trials) {
  ExperimentConfig c;
  c.mechanism = m;
  c.target = {1.0, 1e-6};
  c.stream.users = 256;
  c.trials = trials;
  c.seed = 31;
  return c;
}

TEST(ExperimentTest, ZeroTrialsSkeleton) {
  auto r = RunExperiment(Small(ExperimentMechanism::kTmeHeavyHitters, 0));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->csv, "trial,step,element,answer,true_weight,tier\n");
  EXPECT_NE(r->summary_json.find("\"schema\": 1"), std::string::npos);
  EXPECT_EQ(r->summary.k, 3);
  EXPECT_EQ(r->summary.tiers.at(Tier::kC).total, 0);
}

TEST(ExperimentTest, DeterministicCsvAndFiles) {
  ExperimentConfig c = Small(ExperimentMechanism::kTmeHeavyHitters, 3);
  c.out = (std::filesystem::temp_directory_path() / "dpsvt_experiment_test").string();
  auto x = RunExperiment(c);
  auto y = RunExperiment(c);
  ASSERT_TRUE(x.ok());
  EXPECT_EQ(x->csv, y->csv);
  std::ifstream file(std::filesystem::path(c.out) / "results.csv");
  std::stringstream s;
  s << file.rdbuf();
  EXPECT_EQ(s.str(), x->csv);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.out) / "summary.json"));
  // One row per planted element per trial.
  const auto rows = std::count(x->csv.begin(), x->csv.end(), '\n') - 1;
  EXPECT_EQ(rows, 3 * x->summary.steps);
}

TEST(ExperimentTest, BaselineAndMonitorMechanisms) {
  auto b = RunExperiment(Small(ExperimentMechanism::kAboveThresholdRestart, 2));
  ASSERT_TRUE(b.ok());
  EXPECT_GT(b->summary.baseline_query_scale, 0);
  ExperimentConfig m = Small(ExperimentMechanism::kThresholdMonitor, 2);
  EXPECT_FALSE(RunExperiment(m).ok());  // example-1 stream is not constant
  m.stream.kind = StreamSpec::Kind::kConstant;
  m.stream.users = 30;
  m.stream.steps = 5;
  m.k = 2;
  m.threshold = -1e6;
  auto r = RunExperiment(m);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->summary.reports, 2 * 5);
}

TEST(ExperimentTest, ScaledExample1Utility) {
  // Small hand-set noise on a 256-user stream: every element of weight at
  // least t + margin must be reported and nothing else of weight < 2 may be.
  auto stream = GenerateExample1(256, 77);
  const double scale1 = 0.01, scale2 = 0.005;
  std::int64_t queries = 0;
  for (const auto& s : stream->snapshots) queries += std::ssize(CollectCandidates(s).elements);
  const int runs = 200;
  const double L = std::log(2.0 * queries * runs / 0.01);
  const double W = 10 * scale1 * L, V = scale2 * L;
  const double t = 1 + W + scale1;
  const double margin = W + V;
  EvolvingConfig c{.epsilon = 1, .delta = 1e-6, .threshold = t, .budget = 3,
                   .scale1 = scale1, .scale2 = scale2, .users = 256};
  int good = 0;
  for (int run = 0; run < runs; ++run) {
    auto reports = RunShiftingHeavyHitters(c, stream->snapshots, NoiseSource::ForTrial(5, run));
    ASSERT_TRUE(reports.ok());
    bool ok = true;
    for (std::size_t s = 0; s < reports->size(); ++s) {
      const PlantedHeavy& p = stream->planted[s];
      const auto& ids = (*reports)[s].identified;
      const bool found = std::binary_search(ids.begin(), ids.end(), p.element);
      if (p.weight >= t + margin && !found) ok = false;
      if (ids.size() > (found ? 1u : 0u)) ok = false;
    }
    good += ok;
  }
  EXPECT_GE(good, 198);
}

}  // namespace
}  // namespace dpsvt
