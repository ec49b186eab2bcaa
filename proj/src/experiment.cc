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

#include "dpsvt/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpsvt/baseline.h"
#include "dpsvt/heavy_hitters.h"
#include "dpsvt/parallel.h"
#include "dpsvt/threshold_monitor.h"
#include "json.hpp"

namespace dpsvt {
namespace {

using json = nlohmann::ordered_json;

// Index of the stream-generator seed among the master seed's children;
// trials use indices 0 .. trials - 1.
constexpr std::uint64_t kStreamSeedIndex = 0xffff'ffff'ffffULL;

enum class Outcome : char { kBot = 'B', kTop = 'T', kHalt = 'H' };

const char* OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kTop:
      return "Top";
    case Outcome::kBot:
      return "Bot";
    case Outcome::kHalt:
      break;
  }
  return "Halt";
}

struct Row {
  std::int64_t step;
  std::int64_t element;
  Outcome answer;
  std::int64_t weight;
  Tier tier;
};

struct TrialState {
  std::optional<ShiftingHeavyHitters> tme;
  std::optional<ThresholdMonitor> monitor;
  std::optional<RestartBaseline> baseline;

  std::map<Tier, TierRecall> tiers;
  std::int64_t reports = 0;
  std::int64_t heavy_reports = 0;
  std::int64_t low_weight_reports = 0;
  std::int64_t zero_weight_reports = 0;
  bool halted = false;
  std::vector<Row> rows;
};

absl::Status Invalid(const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat("config: ", what));
}

absl::StatusOr<ExperimentMechanism> ParseMechanism(const std::string& name) {
  for (ExperimentMechanism m : {ExperimentMechanism::kAboveThresholdRestart,
                                ExperimentMechanism::kThresholdMonitor,
                                ExperimentMechanism::kTmeHeavyHitters}) {
    if (name == MechanismName(m)) return m;
  }
  return Invalid(absl::StrCat("unknown mechanism '", name, "'"));
}

absl::StatusOr<StreamSpec> ParseStream(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return Invalid("stream must be an object with a string 'kind'");
  }
  StreamSpec spec;
  const std::string kind = j["kind"].get<std::string>();
  const std::set<std::string> allowed =
      kind == "example1"   ? std::set<std::string>{"kind", "n", "seed"}
      : kind == "constant" ? std::set<std::string>{"kind", "n", "element", "steps"}
                           : std::set<std::string>{"kind", "path"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      return Invalid(absl::StrCat("unknown key 'stream.", key, "' for kind '", kind, "'"));
    }
  }
  auto integer = [&](const char* key, std::int64_t& out) -> absl::Status {
    if (!j.contains(key)) return absl::OkStatus();
    if (!j[key].is_number_integer()) {
      return Invalid(absl::StrCat("stream.", key, " must be an integer"));
    }
    out = j[key].get<std::int64_t>();
    return absl::OkStatus();
  };
  if (kind == "example1") {
    spec.kind = StreamSpec::Kind::kExample1;
    if (absl::Status s = integer("n", spec.users); !s.ok()) return s;
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) {
        return Invalid("stream.seed must be a nonnegative integer");
      }
      spec.seed = j["seed"].get<std::uint64_t>();
    }
  } else if (kind == "constant") {
    spec.kind = StreamSpec::Kind::kConstant;
    for (auto [key, field] : {std::pair{"n", &spec.users},
                              std::pair{"element", &spec.element},
                              std::pair{"steps", &spec.steps}}) {
      if (absl::Status s = integer(key, *field); !s.ok()) return s;
    }
  } else if (kind == "scripted") {
    spec.kind = StreamSpec::Kind::kScripted;
    if (!j.contains("path") || !j["path"].is_string()) {
      return Invalid("scripted stream needs a string 'path'");
    }
    spec.path = j["path"].get<std::string>();
  } else {
    return Invalid(absl::StrCat("unknown stream kind '", kind, "'"));
  }
  return spec;
}

absl::StatusOr<UserStream> BuildStream(const ExperimentConfig& config) {
  const StreamSpec& spec = config.stream;
  switch (spec.kind) {
    case StreamSpec::Kind::kExample1:
      return GenerateExample1(
          spec.users,
          spec.seed.value_or(DeriveSeed(config.seed, kStreamSeedIndex)));
    case StreamSpec::Kind::kConstant:
      return ConstantStream(spec.users, MakeElement(spec.element), spec.steps);
    case StreamSpec::Kind::kScripted: {
      std::ifstream in(spec.path);
      if (!in) {
        return absl::NotFoundError(
            absl::StrCat("cannot open stream file ", spec.path));
      }
      return ReadStream(in);
    }
  }
  return Invalid("bad stream kind");
}

std::int64_t DomainSize(const UserStream& stream) {
  std::unordered_set<ElementId> seen;
  for (const UserSnapshot& snapshot : stream.snapshots) {
    seen.insert(snapshot.begin(), snapshot.end());
  }
  return std::ssize(seen);
}

json SummaryJson(const ExperimentConfig& config, const ExperimentSummary& s) {
  json tiers = json::object();
  for (const auto& [tier, r] : s.tiers) {
    tiers[TierName(tier)] = {
        {"hits", r.hits}, {"total", r.total}, {"recall", r.recall()}};
  }
  json k = config.k.has_value() ? json(*config.k) : json("auto");
  json threshold =
      config.threshold.has_value() ? json(*config.threshold) : json(nullptr);
  return json{
      {"schema", 1},
      {"mechanism", s.mechanism},
      {"config",
       {{"epsilon", config.target.epsilon},
        {"delta", config.target.delta},
        {"k", std::move(k)},
        {"threshold", std::move(threshold)},
        {"tau_constant", config.tau_constant},
        {"beta", config.beta},
        {"trials", config.trials},
        {"seed", config.seed},
        {"heavy_min_weight", config.heavy_min_weight}}},
      {"stream",
       {{"users", s.users},
        {"steps", s.steps},
        {"domain_size", s.domain_size}}},
      {"k", s.k},
      {"k_auto", s.k_auto},
      {"max_heavy_participation", s.max_participation},
      {"tau", s.tau},
      {"threshold", s.threshold},
      {"calibrated",
       {{"epsilon_tilde", s.scales.epsilon_tilde},
        {"delta_tilde", s.scales.delta_tilde},
        {"delta_cap", s.scales.scale1},
        {"delta1", s.scales.scale1},
        {"delta2", s.scales.scale2},
        {"w_scale", s.w_scale},
        {"v_scale", s.scales.scale2},
        {"xi", s.xi},
        {"epsilon0", s.epsilon0.epsilon},
        {"epsilon0_delta", s.epsilon0.delta}}},
      {"baseline",
       {{"max_restarts", s.max_restarts},
        {"instance_epsilon", s.baseline_instance_epsilon},
        {"query_scale", s.baseline_query_scale},
        {"threshold_scale", s.baseline_threshold_scale}}},
      {"scale_comparison",
       {{"monitor_per_query_scale", s.w_scale},
        {"monitor_capped_scale", s.scales.scale2},
        {"baseline_per_query_scale", s.baseline_query_scale},
        {"monitor_smaller", s.w_scale < s.baseline_query_scale}}},
      {"tiers", std::move(tiers)},
      {"reports", s.reports},
      {"heavy_reports", s.heavy_reports},
      {"low_weight_reports", s.low_weight_reports},
      {"zero_weight_reports", s.zero_weight_reports},
      {"precision", s.precision()},
      {"baseline_halts", s.baseline_halts},
      {"wall_clock_seconds", s.wall_clock_seconds}};
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing ", path.string()));
  }
  return absl::OkStatus();
}

}  // namespace

const char* MechanismName(ExperimentMechanism mechanism) {
  switch (mechanism) {
    case ExperimentMechanism::kAboveThresholdRestart:
      return "above_threshold_restart";
    case ExperimentMechanism::kThresholdMonitor:
      return "threshold_monitor";
    case ExperimentMechanism::kTmeHeavyHitters:
      break;
  }
  return "tme_heavy_hitters";
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Invalid("not a JSON object");
  }
  static const std::unordered_set<std::string> kKnown = {
      "mechanism", "epsilon", "delta",  "seed",         "stream",
      "k",         "threshold", "tau_constant", "beta", "trials",
      "out",       "max_restarts", "heavy_min_weight"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) return Invalid(absl::StrCat("unknown key '", key, "'"));
  }
  for (const char* key : {"mechanism", "epsilon", "delta", "seed", "stream"}) {
    if (!j.contains(key)) return Invalid(absl::StrCat("missing '", key, "'"));
  }
  ExperimentConfig config;
  if (!j["mechanism"].is_string()) return Invalid("mechanism must be a string");
  absl::StatusOr<ExperimentMechanism> mechanism =
      ParseMechanism(j["mechanism"].get<std::string>());
  if (!mechanism.ok()) return mechanism.status();
  config.mechanism = *mechanism;

  auto number = [&](const char* key, double& out) -> absl::Status {
    if (!j.contains(key)) return absl::OkStatus();
    if (!j[key].is_number()) {
      return Invalid(absl::StrCat("'", key, "' must be a number"));
    }
    out = j[key].get<double>();
    return absl::OkStatus();
  };
  for (auto [key, field] :
       {std::pair{"epsilon", &config.target.epsilon},
        std::pair{"delta", &config.target.delta},
        std::pair{"tau_constant", &config.tau_constant},
        std::pair{"beta", &config.beta},
        std::pair{"heavy_min_weight", &config.heavy_min_weight}}) {
    if (absl::Status s = number(key, *field); !s.ok()) return s;
  }
  if (j.contains("threshold")) {
    double t = 0;
    if (absl::Status s = number("threshold", t); !s.ok()) return s;
    config.threshold = t;
  }
  if (j.contains("k")) {
    if (j["k"].is_string() && j["k"].get<std::string>() == "auto") {
      config.k.reset();
    } else if (j["k"].is_number()) {
      config.k = j["k"].get<double>();
    } else {
      return Invalid("'k' must be a number or \"auto\"");
    }
  }
  if (!j["seed"].is_number_unsigned()) {
    return Invalid("'seed' must be a nonnegative integer");
  }
  config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer()) return Invalid("'trials' must be an integer");
    config.trials = j["trials"].get<std::int64_t>();
  }
  if (j.contains("max_restarts")) {
    if (!j["max_restarts"].is_number_integer()) {
      return Invalid("'max_restarts' must be an integer");
    }
    config.max_restarts = j["max_restarts"].get<std::int64_t>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) return Invalid("'out' must be a string");
    config.out = j["out"].get<std::string>();
  }
  absl::StatusOr<StreamSpec> stream = ParseStream(j["stream"]);
  if (!stream.ok()) return stream.status();
  config.stream = *std::move(stream);
  return config;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  absl::StatusOr<UserStream> stream = BuildStream(config);
  if (!stream.ok()) return stream.status();
  return RunExperimentOnStream(config, *stream);
}

absl::StatusOr<ExperimentResult> RunExperimentOnStream(
    const ExperimentConfig& config, const UserStream& stream) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trials < 0) return Invalid("trials must be >= 0");
  if (stream.users < 1) return Invalid("stream has no users");

  ExperimentSummary summary;
  summary.mechanism = MechanismName(config.mechanism);
  summary.trials = config.trials;
  summary.users = stream.users;
  summary.steps = std::ssize(stream.snapshots);
  summary.domain_size = DomainSize(stream);
  for (Tier tier : {Tier::kA, Tier::kB, Tier::kC}) summary.tiers[tier];

  auto tau = [&](double k) {
    return Tau(k, config.target.epsilon, config.target.delta,
               static_cast<double>(std::max<std::int64_t>(1, summary.steps)),
               static_cast<double>(summary.domain_size), config.beta,
               config.tau_constant);
  };
  if (config.k.has_value()) {
    summary.k = *config.k;
    const auto counts = HeavyParticipation(stream, config.heavy_min_weight);
    summary.max_participation =
        counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  } else {
    absl::StatusOr<KStarResolution> k_star = ResolveKStar(
        stream, [&](std::int64_t k) -> absl::StatusOr<double> {
          absl::StatusOr<double> t = tau(static_cast<double>(k));
          if (!t.ok()) return t.status();
          return std::min(*t, config.heavy_min_weight);
        });
    if (!k_star.ok()) return k_star.status();
    summary.k = static_cast<double>(k_star->k);
    summary.k_auto = true;
    summary.max_participation = k_star->max_participation;
  }
  absl::StatusOr<double> tau_k = tau(summary.k);
  if (!tau_k.ok()) return tau_k.status();
  summary.tau = *tau_k;
  summary.threshold = config.threshold.value_or(summary.tau);

  absl::StatusOr<EvolvingScales> scales =
      CalibrateEvolving(config.target, summary.k, stream.users);
  if (!scales.ok()) return scales.status();
  summary.scales = *scales;
  summary.w_scale = 10.0 * scales->scale1;
  absl::StatusOr<double> xi =
      XiBound(scales->epsilon_tilde, scales->delta_tilde, summary.k);
  if (!xi.ok()) return xi.status();
  summary.xi = *xi;
  absl::StatusOr<PrivacyBudget> eps0 =
      Epsilon0Bound(scales->epsilon_tilde, scales->delta_tilde, summary.k);
  if (!eps0.ok()) return eps0.status();
  summary.epsilon0 = *eps0;

  std::int64_t c_tier = 0;
  for (const PlantedHeavy& p : stream.planted) c_tier += p.tier == Tier::kC;
  summary.max_restarts = config.max_restarts.value_or(
      c_tier > 0 ? c_tier : std::max<std::int64_t>(1, summary.steps));
  absl::StatusOr<double> instance_epsilon =
      BaselineInstanceEpsilon(config.target, summary.max_restarts);
  if (!instance_epsilon.ok()) return instance_epsilon.status();
  summary.baseline_instance_epsilon = *instance_epsilon;
  summary.baseline_query_scale = 4.0 / *instance_epsilon;
  summary.baseline_threshold_scale = 2.0 / *instance_epsilon;

  if (config.mechanism == ExperimentMechanism::kThresholdMonitor) {
    for (const UserSnapshot& snapshot : stream.snapshots) {
      if (snapshot != stream.snapshots.front()) {
        return Invalid("threshold_monitor needs a constant stream");
      }
    }
  }

  // Trial states.
  std::vector<TrialState> trials(static_cast<std::size_t>(config.trials));
  const EvolvingConfig evolving{.epsilon = config.target.epsilon,
                                .delta = config.target.delta,
                                .threshold = summary.threshold,
                                .budget = summary.k,
                                .scale1 = scales->scale1,
                                .scale2 = scales->scale2,
                                .users = stream.users};
  const MonitorConfig monitor{.epsilon = scales->epsilon_tilde,
                              .delta = scales->delta_tilde,
                              .threshold = summary.threshold,
                              .budget = summary.k};
  const BaselineConfig baseline{.target = config.target,
                                .threshold = summary.threshold,
                                .max_restarts = summary.max_restarts};
  for (std::int64_t t = 0; t < config.trials; ++t) {
    TrialState& state = trials[static_cast<std::size_t>(t)];
    NoiseSource noise =
        NoiseSource::ForTrial(config.seed, static_cast<std::uint64_t>(t));
    absl::Status status;
    switch (config.mechanism) {
      case ExperimentMechanism::kTmeHeavyHitters: {
        auto s = ShiftingHeavyHitters::Create(evolving, std::move(noise));
        if (s.ok()) state.tme.emplace(*std::move(s));
        status = s.status();
        break;
      }
      case ExperimentMechanism::kThresholdMonitor: {
        const UserSnapshot& first = stream.snapshots.empty()
                                        ? UserSnapshot{}
                                        : stream.snapshots.front();
        auto m = ThresholdMonitor::Create(Database::FromElements(first),
                                          monitor, std::move(noise));
        if (m.ok()) state.monitor.emplace(*std::move(m));
        status = m.status();
        break;
      }
      case ExperimentMechanism::kAboveThresholdRestart: {
        auto b = RestartBaseline::Create(baseline, std::move(noise));
        if (b.ok()) state.baseline.emplace(*std::move(b));
        status = b.status();
        break;
      }
    }
    if (!status.ok()) return status;
  }

  // Steps outside, trials inside: a step's candidates are built once.
  std::vector<std::vector<PlantedHeavy>> planted_at(stream.snapshots.size());
  for (const PlantedHeavy& p : stream.planted) {
    if (p.step >= 1 && p.step <= summary.steps) {
      planted_at[static_cast<std::size_t>(p.step - 1)].push_back(p);
    }
  }
  for (std::int64_t step = 1; step <= summary.steps; ++step) {
    const Candidates candidates =
        CollectCandidates(stream.snapshots[static_cast<std::size_t>(step - 1)]);
    std::unordered_map<ElementId, std::int64_t> weight;
    weight.reserve(candidates.elements.size());
    for (std::size_t c = 0; c < candidates.elements.size(); ++c) {
      weight[candidates.elements[c]] = std::ssize(candidates.holders[c]);
    }
    const auto& planted = planted_at[static_cast<std::size_t>(step - 1)];

    absl::Status status = ParallelChunks(
        config.trials,
        [&](std::int64_t begin, std::int64_t end,
            std::int64_t) -> absl::Status {
          std::vector<ElementId> identified;
          for (std::int64_t t = begin; t < end; ++t) {
            TrialState& state = trials[static_cast<std::size_t>(t)];
            identified.clear();
            if (state.tme.has_value()) {
              absl::StatusOr<HeavyHitterReport> r = state.tme->Step(candidates);
              if (!r.ok()) return r.status();
              identified = std::move(r->identified);
            } else {
              for (std::size_t c = 0; c < candidates.elements.size(); ++c) {
                absl::StatusOr<Answer> a;
                if (state.monitor.has_value()) {
                  a = state.monitor->Step(Query::Point(candidates.elements[c]));
                } else if (state.baseline->exhausted()) {
                  state.halted = true;
                  break;
                } else {
                  a = state.baseline->StepValue(
                      static_cast<double>(candidates.holders[c].size()));
                }
                if (!a.ok()) return a.status();
                if (*a == Answer::kTop) {
                  identified.push_back(candidates.elements[c]);
                }
              }
              std::sort(identified.begin(), identified.end());
            }
            for (ElementId x : identified) {
              auto it = weight.find(x);
              const std::int64_t w = it == weight.end() ? 0 : it->second;
              ++state.reports;
              if (w == 0) {
                ++state.zero_weight_reports;
              } else if (static_cast<double>(w) < config.heavy_min_weight) {
                ++state.low_weight_reports;
              } else {
                ++state.heavy_reports;
              }
            }
            for (const PlantedHeavy& p : planted) {
              const bool top = std::binary_search(
                  identified.begin(), identified.end(), p.element);
              Outcome o = top ? Outcome::kTop : Outcome::kBot;
              if (!top && state.halted) o = Outcome::kHalt;
              TierRecall& r = state.tiers[p.tier];
              ++r.total;
              r.hits += top;
              state.rows.push_back(Row{step, ElementValue(p.element), o,
                                       weight.count(p.element)
                                           ? weight.at(p.element)
                                           : 0,
                                       p.tier});
            }
          }
          return absl::OkStatus();
        });
    if (!status.ok()) return status;
  }

  // Single writer, trial order.
  std::ostringstream csv;
  csv << "trial,step,element,answer,true_weight,tier\n";
  for (std::int64_t t = 0; t < config.trials; ++t) {
    const TrialState& state = trials[static_cast<std::size_t>(t)];
    for (const Row& row : state.rows) {
      csv << t << ',' << row.step << ',' << row.element << ','
          << OutcomeName(row.answer) << ',' << row.weight << ','
          << TierName(row.tier) << '\n';
    }
    for (const auto& [tier, r] : state.tiers) {
      summary.tiers[tier].hits += r.hits;
      summary.tiers[tier].total += r.total;
    }
    summary.reports += state.reports;
    summary.heavy_reports += state.heavy_reports;
    summary.low_weight_reports += state.low_weight_reports;
    summary.zero_weight_reports += state.zero_weight_reports;
    summary.baseline_halts += state.halted;
  }
  summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ExperimentResult result{.summary = summary,
                          .csv = csv.str(),
                          .summary_json = SummaryJson(config, summary).dump(2) +
                                          "\n"};
  if (!config.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    if (ec) {
      return absl::PermissionDeniedError(
          absl::StrCat("cannot create ", config.out, ": ", ec.message()));
    }
    const std::filesystem::path dir(config.out);
    if (absl::Status s = WriteFile(dir / "results.csv", result.csv); !s.ok()) {
      return s;
    }
    if (absl::Status s = WriteFile(dir / "summary.json", result.summary_json);
        !s.ok()) {
      return s;
    }
  }
  return result;
}

}  // namespace dpsvt
