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

// svtmon: command-line front end for the threshold monitors, the restart
// baseline, the audits and the privacy calculators.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpsvt/audit_scenarios.h"
#include "dpsvt/baseline.h"
#include "dpsvt/debug_trace.h"
#include "dpsvt/event_audit.h"
#include "dpsvt/experiment.h"
#include "dpsvt/game.h"
#include "dpsvt/heavy_hitters.h"
#include "dpsvt/privacy_audit.h"
#include "dpsvt/privacy_calc.h"
#include "dpsvt/stream.h"
#include "dpsvt/threshold_monitor.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace dpsvt;

struct CommonFlags {
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> k;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string config;
  std::string out;
  bool debug_trace = false;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--epsilon", f.epsilon, "Privacy parameter epsilon");
  app->add_option("--delta", f.delta, "Privacy parameter delta");
  app->add_option("--k", f.k, "Contribution budget k");
  app->add_option("--threshold", f.threshold, "Threshold t");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--trials", f.trials, "Monte-Carlo trials");
  app->add_option("--config", f.config, "Experiment config (JSON)");
  app->add_option("--out", f.out, "Output directory");
  app->add_flag("--debug-trace", f.debug_trace,
                "Emit non-private round internals");
}

const char* CodeName(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kInvalidArgument:
      return "invalid_argument";
    case absl::StatusCode::kNotFound:
      return "not_found";
    case absl::StatusCode::kResourceExhausted:
      return "resource_exhausted";
    case absl::StatusCode::kFailedPrecondition:
      return "failed_precondition";
    case absl::StatusCode::kDataLoss:
      return "io";
    case absl::StatusCode::kPermissionDenied:
      return "permission_denied";
    default:
      return "internal";
  }
}

int Fail(const absl::Status& status) {
  std::cerr << json{{"error",
                     {{"code", CodeName(status.code())},
                      {"message", std::string(status.message())}}}}
                   .dump()
            << '\n';
  return 2;
}

template <typename T>
absl::StatusOr<T> Require(const std::optional<T>& value, const char* flag) {
  if (!value.has_value()) {
    return absl::InvalidArgumentError(absl::StrCat("missing ", flag));
  }
  return *value;
}

absl::StatusOr<std::string> Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

absl::StatusOr<Database> LoadDatabase(const std::string& path) {
  absl::StatusOr<std::string> text = Slurp(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": database must be a JSON array of elements"));
  }
  std::vector<ElementId> elements;
  for (const json& x : j) {
    if (!x.is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": elements must be integers"));
    }
    elements.push_back(MakeElement(x.get<std::int64_t>()));
  }
  return Database::FromElements(elements);
}

absl::StatusOr<std::vector<Query>> LoadQueries(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadQueries(in);
}

// Writes to out/name, or to stdout when no directory was given.
absl::Status Emit(const std::string& out, const std::string& name,
                  const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return absl::OkStatus();
  }
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", out, ": ", ec.message()));
  }
  std::ofstream file(std::filesystem::path(out) / name, std::ios::binary);
  file << content;
  file.close();
  if (!file) return absl::DataLossError(absl::StrCat("failed writing ", name));
  return absl::OkStatus();
}

absl::Status RunConfigured(const CommonFlags& f, ExperimentMechanism mechanism) {
  absl::StatusOr<std::string> text = Slurp(f.config);
  if (!text.ok()) return text.status();
  absl::StatusOr<ExperimentConfig> config = ParseExperimentConfig(*text);
  if (!config.ok()) return config.status();
  config->mechanism = mechanism;
  if (f.epsilon) config->target.epsilon = *f.epsilon;
  if (f.delta) config->target.delta = *f.delta;
  if (f.k) config->k = *f.k;
  if (f.threshold) config->threshold = *f.threshold;
  if (f.seed) config->seed = *f.seed;
  if (f.trials) config->trials = *f.trials;
  if (!f.out.empty()) config->out = f.out;
  absl::StatusOr<ExperimentResult> result = RunExperiment(*config);
  if (!result.ok()) return result.status();
  std::cout << result->summary_json;
  return absl::OkStatus();
}

absl::Status RunMonitor(const CommonFlags& f, const std::string& db_path,
                        const std::string& query_path) {
  if (!f.config.empty()) {
    return RunConfigured(f, ExperimentMechanism::kThresholdMonitor);
  }
  MonitorConfig config;
  absl::StatusOr<double> v = Require(f.epsilon, "--epsilon");
  if (!v.ok()) return v.status();
  config.epsilon = *v;
  if (!(v = Require(f.delta, "--delta")).ok()) return v.status();
  config.delta = *v;
  if (!(v = Require(f.threshold, "--threshold")).ok()) return v.status();
  config.threshold = *v;
  config.budget = f.k.value_or(1.0);
  absl::StatusOr<Database> db = LoadDatabase(db_path);
  if (!db.ok()) return db.status();
  absl::StatusOr<std::vector<Query>> queries = LoadQueries(query_path);
  if (!queries.ok()) return queries.status();
  absl::StatusOr<TracingThresholdMonitor> monitor =
      TracingThresholdMonitor::Create(*std::move(db), config,
                                      NoiseSource::Seeded(f.seed.value_or(0)));
  if (!monitor.ok()) return monitor.status();

  std::ostringstream csv;
  csv << (f.debug_trace
              ? "round,answer,true_value,w,v,v_capped,noisy_value\n"
              : "round,answer\n");
  csv.precision(17);
  for (const Query& q : *queries) {
    absl::StatusOr<RoundTrace> t = monitor->Step(q);
    if (!t.ok()) return t.status();
    csv << t->round << ',' << AnswerName(t->answer);
    if (f.debug_trace) {
      csv << ',' << t->true_value << ',' << t->w << ',' << t->v << ','
          << t->v_capped << ',' << t->noisy_value;
    }
    csv << '\n';
  }
  return Emit(f.out, "transcript.csv", csv.str());
}

absl::Status RunHeavyHitters(const CommonFlags& f,
                             const std::string& stream_path) {
  if (!f.config.empty()) {
    return RunConfigured(f, ExperimentMechanism::kTmeHeavyHitters);
  }
  absl::StatusOr<double> eps = Require(f.epsilon, "--epsilon");
  if (!eps.ok()) return eps.status();
  absl::StatusOr<double> delta = Require(f.delta, "--delta");
  if (!delta.ok()) return delta.status();
  absl::StatusOr<double> t = Require(f.threshold, "--threshold");
  if (!t.ok()) return t.status();
  std::ifstream in(stream_path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", stream_path));
  absl::StatusOr<UserStream> stream = ReadStream(in);
  if (!stream.ok()) return stream.status();
  const double k = f.k.value_or(1.0);
  absl::StatusOr<EvolvingScales> scales =
      CalibrateEvolving({*eps, *delta}, k, std::max<std::int64_t>(1, stream->users));
  if (!scales.ok()) return scales.status();
  const EvolvingConfig config{.epsilon = *eps,
                              .delta = *delta,
                              .threshold = *t,
                              .budget = k,
                              .scale1 = scales->scale1,
                              .scale2 = scales->scale2,
                              .users = std::max<std::int64_t>(1, stream->users)};
  absl::StatusOr<std::vector<HeavyHitterReport>> reports =
      RunShiftingHeavyHitters(config, stream->snapshots,
                              NoiseSource::Seeded(f.seed.value_or(0)));
  if (!reports.ok()) return reports.status();
  std::ostringstream out;
  for (const HeavyHitterReport& r : *reports) {
    json ids = json::array();
    for (ElementId x : r.identified) ids.push_back(ElementValue(x));
    out << json{{"step", r.step}, {"identified", std::move(ids)}}.dump()
        << '\n';
  }
  return Emit(f.out, "reports.jsonl", out.str());
}

absl::Status RunBaseline(const CommonFlags& f, const std::string& db_path,
                         const std::string& query_path,
                         std::int64_t max_restarts) {
  if (!f.config.empty()) {
    return RunConfigured(f, ExperimentMechanism::kAboveThresholdRestart);
  }
  BaselineConfig config;
  absl::StatusOr<double> v = Require(f.epsilon, "--epsilon");
  if (!v.ok()) return v.status();
  config.target.epsilon = *v;
  if (!(v = Require(f.delta, "--delta")).ok()) return v.status();
  config.target.delta = *v;
  if (!(v = Require(f.threshold, "--threshold")).ok()) return v.status();
  config.threshold = *v;
  config.max_restarts = max_restarts;
  absl::StatusOr<Database> db = LoadDatabase(db_path);
  if (!db.ok()) return db.status();
  absl::StatusOr<std::vector<Query>> queries = LoadQueries(query_path);
  if (!queries.ok()) return queries.status();
  absl::StatusOr<BaselineRun> run = RunBaselineRestart(
      *db, config, *queries, NoiseSource::Seeded(f.seed.value_or(0)));
  if (!run.ok()) return run.status();
  json answers = json::array();
  for (Answer a : run->transcript) answers.push_back(AnswerName(a));
  if (run->halted) answers.push_back("Halt");
  json ledger = json::array();
  for (const BaselineLedgerEntry& e : run->ledger) {
    ledger.push_back({{"instance", e.instance},
                      {"opened_at", e.opened_at},
                      {"epsilon_spent", e.epsilon_spent},
                      {"delta_spent", e.delta_spent}});
  }
  return Emit(f.out, "baseline.json",
              json{{"transcript", std::move(answers)},
                   {"halted", run->halted},
                   {"ledger", std::move(ledger)}}
                      .dump(2) +
                  "\n");
}

json ProportionJson(const ProportionEstimate& p) {
  return {{"hits", p.hits},
          {"trials", p.trials},
          {"estimate", p.estimate},
          {"lower", p.interval.lower},
          {"upper", p.interval.upper},
          {"standard_error", p.standard_error}};
}

absl::StatusOr<json> AuditPrivacy(const CommonFlags& f,
                                  const std::string& mechanism,
                                  std::int64_t rounds) {
  PrivacyAuditConfig config;
  config.trials = f.trials.value_or(100000);
  config.master_seed = f.seed.value_or(0);
  const double eps = f.epsilon.value_or(1.0);
  AuditScenario scenario = CountingScenario(4, rounds, 2.0);
  if (mechanism == "above_threshold") {
    config.mechanism.kind = MechanismKind::kAboveThreshold;
    config.mechanism.config.epsilon = eps;
    config.theoretical_epsilon = eps;
    config.delta_total = 0;
  } else if (mechanism == "threshold_monitor") {
    const double k = f.k.value_or(2.0);
    const PrivacyBudget target{eps, f.delta.value_or(1e-3)};
    absl::StatusOr<MonitorParameters> p = CalibrateMonitor(target, k);
    if (!p.ok()) return p.status();
    absl::StatusOr<PrivacyBudget> spent =
        Epsilon0Bound(p->epsilon, p->delta, k);
    if (!spent.ok()) return spent.status();
    config.mechanism.kind = MechanismKind::kThresholdMonitor;
    config.mechanism.config = {.epsilon = p->epsilon,
                               .delta = p->delta,
                               .threshold = 0,
                               .budget = k};
    config.theoretical_epsilon = spent->epsilon;
    config.delta_total = spent->delta;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown mechanism '", mechanism, "'"));
  }
  config.mechanism.config.threshold = f.threshold.value_or(scenario.threshold);
  const auto events = StandardEventFamily(rounds);
  absl::StatusOr<std::vector<PrivacyLossEntry>> entries = EstimatePrivacyLoss(
      config, scenario.pair, scenario.adversary, events);
  if (!entries.ok()) return entries.status();
  json rows = json::array();
  double worst = 0;
  bool violation = false;
  for (const PrivacyLossEntry& e : *entries) {
    worst = std::max(worst, e.lower_bound());
    violation |= e.violation;
    rows.push_back({{"event", e.event},
                    {"base", ProportionJson(e.on_base)},
                    {"neighbor", ProportionJson(e.on_neighbor)},
                    {"lower_bound", e.lower_bound()},
                    {"violation", e.violation}});
  }
  return json{{"kind", "privacy"},
              {"mechanism", mechanism},
              {"theoretical_epsilon", config.theoretical_epsilon},
              {"delta_total", config.delta_total},
              {"max_lower_bound", worst},
              {"violation", violation},
              {"events", std::move(rows)}};
}

absl::StatusOr<json> AuditEvents(const CommonFlags& f, std::int64_t rounds) {
  if (!f.debug_trace) {
    return absl::FailedPreconditionError(
        "event audits read non-private internals; pass --debug-trace");
  }
  MonitorConfig config{.epsilon = f.epsilon.value_or(0.5),
                       .delta = f.delta.value_or(1e-2),
                       .threshold = 0,
                       .budget = f.k.value_or(2.0)};
  absl::StatusOr<double> cap = DeltaCap(config.epsilon, config.delta);
  if (!cap.ok()) return cap.status();
  AuditScenario scenario = NearThresholdScenario(rounds, 4, *cap);
  config.threshold = f.threshold.value_or(scenario.threshold);
  absl::StatusOr<EventFrequencies> freq = EstimateEventFrequencies(
      config, scenario.pair, scenario.adversary,
      f.trials.value_or(100000), f.seed.value_or(0));
  if (!freq.ok()) return freq.status();
  return json{{"kind", "events"},
              {"bounds",
               {{"almost_top_weight", freq->bounds.almost_top_weight},
                {"special_almost_count", freq->bounds.special_almost_count}}},
              {"e1", ProportionJson(freq->e1)},
              {"e2", ProportionJson(freq->e2)},
              {"e3", ProportionJson(freq->e3)},
              {"max_almost_top_weight", freq->max_almost_top_weight},
              {"max_special_almost_count", freq->max_special_almost_count}};
}

absl::StatusOr<json> AuditGame(const CommonFlags& f, std::int64_t rounds) {
  const double k = f.k.value_or(1.0);
  std::vector<double> lambdas;
  for (int j = 0; j < 6; ++j) lambdas.push_back(15.0 * (k + 1) + 5.0 * j);
  const std::pair<const char*, GameStrategy> strategies[] = {
      {"constant", ConstantStrategy(0.5, 0.125, 1.0)},
      {"constant_half", ConstantStrategy(0.5, 0.125, 0.5)},
      {"escalating", EscalatingGammaStrategy(rounds)},
      {"budget_aware", BudgetAwareStrategy(k)},
      {"double_or_nothing", DoubleOrNothingStrategy()}};
  json out = json::array();
  for (const auto& [name, strategy] : strategies) {
    absl::StatusOr<std::vector<GameTail>> tails =
        RunGame(strategy, rounds, k, lambdas, f.trials.value_or(100000),
                f.seed.value_or(0));
    if (!tails.ok()) return tails.status();
    json rows = json::array();
    for (const GameTail& t : *tails) {
      rows.push_back({{"lambda", t.lambda},
                      {"probability", t.probability},
                      {"standard_error", t.standard_error},
                      {"bound", t.bound}});
    }
    out.push_back({{"strategy", name}, {"tails", std::move(rows)}});
  }
  return json{{"kind", "game"}, {"k", k}, {"strategies", std::move(out)}};
}

absl::Status RunCompose(const CommonFlags& f) {
  const double eps = f.epsilon.value_or(1.0);
  const double delta = f.delta.value_or(1e-6);
  std::vector<double> ks;
  if (f.k) {
    ks.push_back(*f.k);
  } else {
    ks = {1, 2, 3, 4, 8, 16, 32, 64};
  }
  json rows = json::array();
  for (double k : ks) {
    absl::StatusOr<MonitorParameters> p = CalibrateMonitor({eps, delta}, k);
    if (!p.ok()) return p.status();
    absl::StatusOr<double> cap = DeltaCap(p->epsilon, p->delta);
    if (!cap.ok()) return cap.status();
    absl::StatusOr<double> xi = XiBound(p->epsilon, p->delta, k);
    if (!xi.ok()) return xi.status();
    absl::StatusOr<PrivacyBudget> total = Epsilon0Bound(p->epsilon, p->delta, k);
    if (!total.ok()) return total.status();
    rows.push_back({{"k", k},
                    {"epsilon", p->epsilon},
                    {"delta", p->delta},
                    {"delta_cap", *cap},
                    {"w_scale", 10 * *cap},
                    {"v_scale", std::log(1 / p->delta) / p->epsilon},
                    {"xi", *xi},
                    {"epochs", EpochCount(p->delta, k)},
                    {"epsilon0", total->epsilon},
                    {"epsilon0_delta", total->delta}});
  }
  return Emit(f.out, "compose.json",
              json{{"target", {{"epsilon", eps}, {"delta", delta}}},
                   {"rows", std::move(rows)}}
                      .dump(2) +
                  "\n");
}

absl::Status RunGenStream(const CommonFlags& f, std::int64_t users) {
  const std::uint64_t seed = f.seed.value_or(0);
  absl::StatusOr<UserStream> stream = GenerateExample1(users, seed);
  if (!stream.ok()) return stream.status();
  if (f.out.empty()) return WriteStream(*stream, std::cout);
  std::ostringstream text;
  if (absl::Status s = WriteStream(*stream, text); !s.ok()) return s;
  if (absl::Status s = Emit(f.out, "stream.jsonl", text.str()); !s.ok()) {
    return s;
  }
  std::ostringstream planted;
  planted << "step,element,tier,weight\n";
  for (const PlantedHeavy& p : stream->planted) {
    planted << p.step << ',' << ElementValue(p.element) << ','
            << TierName(p.tier) << ',' << p.weight << '\n';
  }
  if (absl::Status s = Emit(f.out, "planted.csv", planted.str()); !s.ok()) {
    return s;
  }
  const auto counts = HeavyParticipation(*stream, 2.0);
  std::cout << json{{"users", users},
                    {"steps", stream->snapshots.size()},
                    {"max_heavy_participation",
                     *std::max_element(counts.begin(), counts.end())}}
                   .dump()
            << '\n';
  return absl::OkStatus();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-vector threshold monitors and audits"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string database;
  std::string queries;
  std::string stream;
  std::string kind = "privacy";
  std::string mechanism = "above_threshold";
  std::int64_t rounds = 0;
  std::int64_t max_restarts = 1;
  std::int64_t users = 4096;

  CLI::App* monitor = app.add_subcommand("monitor", "Run ThresholdMonitor");
  AddCommon(monitor, flags);
  monitor->add_option("--database", database, "JSON array of elements");
  monitor->add_option("--queries", queries, "Line-delimited query file");

  CLI::App* hh = app.add_subcommand("hh", "Shifting heavy hitters");
  AddCommon(hh, flags);
  hh->add_option("--stream", stream, "Line-delimited stream file");

  CLI::App* baseline = app.add_subcommand("baseline", "Halt-and-restart SVT");
  AddCommon(baseline, flags);
  baseline->add_option("--database", database, "JSON array of elements");
  baseline->add_option("--queries", queries, "Line-delimited query file");
  baseline->add_option("--max-restarts", max_restarts, "Tops budgeted");

  CLI::App* audit = app.add_subcommand("audit", "Monte-Carlo audits");
  AddCommon(audit, flags);
  audit->add_option("--kind", kind, "privacy, events or game")
      ->check(CLI::IsMember({"privacy", "events", "game"}));
  audit->add_option("--mechanism", mechanism,
                    "above_threshold or threshold_monitor");
  audit->add_option("--rounds", rounds, "Rounds per run");

  CLI::App* compose = app.add_subcommand("compose", "Privacy tables");
  AddCommon(compose, flags);

  CLI::App* gen = app.add_subcommand("gen-stream", "Emit an Example-1 stream");
  AddCommon(gen, flags);
  gen->add_option("--n", users, "Number of users");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail(absl::InvalidArgumentError(e.what()));
  }

  absl::Status status;
  if (*monitor) {
    status = RunMonitor(flags, database, queries);
  } else if (*hh) {
    status = RunHeavyHitters(flags, stream);
  } else if (*baseline) {
    status = RunBaseline(flags, database, queries, max_restarts);
  } else if (*audit) {
    absl::StatusOr<json> report;
    if (kind == "privacy") {
      report = AuditPrivacy(flags, mechanism, rounds > 0 ? rounds : 10);
    } else if (kind == "events") {
      report = AuditEvents(flags, rounds > 0 ? rounds : 50);
    } else {
      report = AuditGame(flags, rounds > 0 ? rounds : 200);
    }
    status = report.ok() ? Emit(flags.out, "audit.json", report->dump(2) + "\n")
                         : report.status();
  } else if (*compose) {
    status = RunCompose(flags);
  } else if (*gen) {
    status = RunGenStream(flags, users);
  }
  if (!status.ok()) return Fail(status);
  return EXIT_SUCCESS;
}
