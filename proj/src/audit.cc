//
// Copyright 2026 The ISAAC Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "isaac/audit.h"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#include "isaac/external_scorer.h"
#include "isaac/random.h"

namespace isaac {
namespace {

using nlohmann::json;

const std::vector<std::string> kMetricNames = {"rs", "c_sep", "overlap",
                                               "sc", "msr", "md"};

void RequireKeys(const json& obj, std::string_view where,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw AuditError(std::string(where) + ": expected a JSON object");
  }
  for (const auto& [key, unused] : obj.items()) {
    if (!allowed.contains(key)) {
      throw AuditError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

bool ValidModelName(std::string_view name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                  c == '-' || c == '.';
         });
}

json Num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json ToJson(const AggregatedMetric& m) {
  json per_run = json::array();
  for (double v : m.per_run) per_run.push_back(Num(v));
  return {{"mean", Num(m.mean)},
          {"std", Num(m.std)},
          {"ci_low", Num(m.ci_low)},
          {"ci_high", Num(m.ci_high)},
          {"per_run", std::move(per_run)}};
}

json ToJson(const std::map<std::string, AggregatedMetric>& table) {
  json out = json::object();
  for (const auto& [name, m] : table) out[name] = ToJson(m);
  return out;
}

std::string Csv(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string HexDigest(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string HostName() {
  char buf[256] = {};
  if (::gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
  return buf;
}

MetricTable PointTable(const std::map<std::string, double>& values) {
  MetricTable t;
  for (const auto& [name, v] : values) t[name] = {v, v, v};
  return t;
}

std::vector<double> ModelMetricVector(std::span<const ResponseSet> responses) {
  const ModelMetrics m = ComputeModelMetrics(responses);
  return {m.rs_mean, m.c_sep, m.overlap, m.sc, m.msr_mean, m.md};
}

void CheckMatchedPair(const TargetRecord& t, const MatchedPair& p) {
  const bool ok =
      p.mech.scope.size() == p.spur.scope.size() && p.mech.op == p.spur.op &&
      p.mech.scope.class_tag == ScopeClass::kMechanistic &&
      p.spur.scope.class_tag == ScopeClass::kSpurious &&
      std::all_of(p.mech.scope.indices.begin(), p.mech.scope.indices.end(),
                  [&](ResidueIndex i) { return t.InPrior(i); }) &&
      std::none_of(p.spur.scope.indices.begin(), p.spur.scope.indices.end(),
                   [&](ResidueIndex i) { return t.InPrior(i); });
  if (!ok) {
    throw AuditError("matched design violated for " + p.mech.intervention_id);
  }
}

}  // namespace

ModelSpec ParseModelFlag(std::string_view flag) {
  const size_t eq = flag.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == flag.size()) {
    throw AuditError("--model expects name=cmd or name=oracle:<name>, got '" +
                     std::string(flag) + "'");
  }
  ModelSpec spec;
  spec.name = std::string(flag.substr(0, eq));
  const std::string_view value = flag.substr(eq + 1);
  constexpr std::string_view kOraclePrefix = "oracle:";
  if (value.starts_with(kOraclePrefix)) {
    spec.oracle = ParseOracleKind(value.substr(kOraclePrefix.size()));
  } else {
    spec.command = std::string(value);
  }
  return spec;
}

void RunConfig::Validate() const {
  if (models.empty()) throw AuditError("config: at least one model is required");
  std::set<std::string> names;
  for (const ModelSpec& m : models) {
    if (!ValidModelName(m.name)) {
      throw AuditError("config: invalid model name '" + m.name + "'");
    }
    if (!names.insert(m.name).second) {
      throw AuditError("config: duplicate model name '" + m.name + "'");
    }
    if (!m.oracle && m.command.empty()) {
      throw AuditError("config: model '" + m.name + "' has no oracle or command");
    }
  }
  sampling.Validate();
  bootstrap.Validate();
  if (n_runs < 1) throw AuditError("config: runs must be at least 1");
  if (auditing_set_path.empty() &&
      (targets_path.empty() || pairs_path.empty())) {
    throw AuditError("config: need targets and pairs, or an auditing_set");
  }
}

RunConfig RunConfigFromJson(const json& doc,
                            const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    RequireKeys(doc, "config", {"targets", "pairs", "auditing_set", "models",
                                "sampling", "bootstrap", "runs", "output",
                                "emit"});
    if (doc.contains("targets")) {
      c.targets_path = Resolve(base_dir, doc["targets"].get<std::string>());
    }
    if (doc.contains("pairs")) {
      c.pairs_path = Resolve(base_dir, doc["pairs"].get<std::string>());
    }
    if (doc.contains("auditing_set")) {
      c.auditing_set_path =
          Resolve(base_dir, doc["auditing_set"].get<std::string>());
    }
    if (doc.contains("output")) {
      c.output_dir = Resolve(base_dir, doc["output"].get<std::string>());
    }
    if (doc.contains("runs")) c.n_runs = doc["runs"].get<uint32_t>();
    for (const json& m : doc.value("models", json::array())) {
      RequireKeys(m, "config.models[]", {"name", "oracle", "command",
                                         "batch_size", "timeout_ms", "affine"});
      ModelSpec spec;
      spec.name = m.at("name").get<std::string>();
      if (m.contains("oracle")) {
        spec.oracle = ParseOracleKind(m["oracle"].get<std::string>());
      }
      if (m.contains("command")) spec.command = m["command"].get<std::string>();
      if (spec.oracle && !spec.command.empty()) {
        throw AuditError("config: model '" + spec.name +
                         "' sets both oracle and command");
      }
      spec.batch_size = m.value("batch_size", spec.batch_size);
      if (m.contains("timeout_ms")) {
        spec.timeout = std::chrono::milliseconds(m["timeout_ms"].get<int64_t>());
      }
      if (m.contains("affine")) {
        const json& a = m["affine"];
        RequireKeys(a, "config.models[].affine", {"scale", "offset"});
        spec.affine = {a.value("scale", 1.0), a.value("offset", 0.0)};
      }
      c.models.push_back(std::move(spec));
    }
    if (doc.contains("sampling")) {
      const json& s = doc["sampling"];
      RequireKeys(s, "config.sampling",
                  {"scope_fraction", "pairs_per_input", "operators", "seed"});
      c.sampling.scope_fraction = s.value("scope_fraction", c.sampling.scope_fraction);
      c.sampling.n_pairs_per_input =
          s.value("pairs_per_input", c.sampling.n_pairs_per_input);
      c.sampling.master_seed = s.value("seed", c.sampling.master_seed);
      if (s.contains("operators")) {
        c.sampling.operators.clear();
        for (const json& op : s["operators"]) {
          c.sampling.operators.push_back(ParseOperator(op.get<std::string>()));
        }
      }
    }
    if (doc.contains("bootstrap")) {
      const json& b = doc["bootstrap"];
      RequireKeys(b, "config.bootstrap", {"replicates", "ci_level", "seed"});
      c.bootstrap.n_replicates = b.value("replicates", c.bootstrap.n_replicates);
      c.bootstrap.ci_level = b.value("ci_level", c.bootstrap.ci_level);
      c.bootstrap.seed = b.value("seed", c.bootstrap.seed);
    }
    if (doc.contains("emit")) {
      const json& e = doc["emit"];
      RequireKeys(e, "config.emit",
                  {"dump_interventions", "per_input", "operator_stratification"});
      c.emit.dump_interventions =
          e.value("dump_interventions", c.emit.dump_interventions);
      c.emit.per_input = e.value("per_input", c.emit.per_input);
      c.emit.operator_stratification =
          e.value("operator_stratification", c.emit.operator_stratification);
    }
  } catch (const json::exception& e) {
    throw AuditError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AuditError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw AuditError(path.string() + ": " + e.what());
  }
  return RunConfigFromJson(doc, path.parent_path());
}

json ToJson(const RunConfig& c) {
  json models = json::array();
  for (const ModelSpec& m : c.models) {
    json rec = {{"name", m.name},
                {"batch_size", m.batch_size},
                {"timeout_ms", m.timeout.count()}};
    if (m.oracle) {
      rec["oracle"] = std::string(ToString(*m.oracle));
    } else {
      rec["command"] = m.command;
    }
    if (m.affine) {
      rec["affine"] = {{"scale", m.affine->first}, {"offset", m.affine->second}};
    }
    models.push_back(std::move(rec));
  }
  json ops = json::array();
  for (Operator op : c.sampling.CanonicalOperators()) {
    ops.push_back(std::string(ToString(op)));
  }
  json out = {{"models", std::move(models)},
              {"sampling",
               {{"scope_fraction", c.sampling.scope_fraction},
                {"pairs_per_input", c.sampling.n_pairs_per_input},
                {"operators", std::move(ops)},
                {"seed", c.sampling.master_seed}}},
              {"bootstrap",
               {{"replicates", c.bootstrap.n_replicates},
                {"ci_level", c.bootstrap.ci_level},
                {"seed", c.bootstrap.seed}}},
              {"runs", c.n_runs},
              {"emit",
               {{"dump_interventions", c.emit.dump_interventions},
                {"per_input", c.emit.per_input},
                {"operator_stratification", c.emit.operator_stratification}}}};
  if (!c.auditing_set_path.empty()) {
    out["auditing_set"] = c.auditing_set_path.filename().string();
  } else {
    out["targets"] = c.targets_path.filename().string();
    out["pairs"] = c.pairs_path.filename().string();
  }
  return out;
}

std::unique_ptr<ScoringEndpoint> MakeEndpoint(
    const ModelSpec& spec, uint64_t seed,
    std::shared_ptr<const PriorLookup> priors) {
  std::unique_ptr<ScoringEndpoint> endpoint;
  if (spec.oracle) {
    endpoint = MakeOracle(*spec.oracle, seed, std::move(priors));
  } else {
    endpoint = std::make_unique<ExternalProcessEndpoint>(ExternalProcessOptions{
        spec.command, spec.command, spec.batch_size, spec.timeout});
  }
  if (spec.affine) {
    endpoint = MakeAffine(std::move(endpoint), spec.affine->first,
                          spec.affine->second);
  }
  return endpoint;
}

AuditReport RunAudit(const RunConfig& config) {
  config.Validate();
  AuditingSet set;
  std::vector<std::string> load_warnings;
  if (!config.auditing_set_path.empty()) {
    set = LoadAuditingSet(config.auditing_set_path);
  } else {
    LoadResult<TargetRecord> targets = LoadTargets(config.targets_path);
    LoadResult<PairRecord> pairs = LoadPairs(config.pairs_path);
    load_warnings = std::move(targets.warnings);
    load_warnings.insert(load_warnings.end(), pairs.warnings.begin(),
                         pairs.warnings.end());
    set = Compile(std::move(targets.records), std::move(pairs.records),
                  CompileConfig{config.sampling.scope_fraction});
  }
  set.warnings.insert(set.warnings.begin(), load_warnings.begin(),
                      load_warnings.end());
  return RunAudit(config, set);
}

AuditReport RunAudit(const RunConfig& config, const AuditingSet& set) {
  config.Validate();
  for (const TargetRecord& t : set.targets) {
    const size_t k =
        ScopeCardinality(t.prior_scope.size(), config.sampling.scope_fraction);
    if (const Realizability r = IsRealizable(t, k); !r) {
      throw AuditError("target '" + t.target_id +
                       "' not realizable under this plan: " + r.reason);
    }
  }
  if (set.pairs.empty()) {
    throw AuditError("auditing set empty: no pairs reference retained targets");
  }

  AuditReport report;
  report.config = ToJson(config);
  report.master_seed = config.sampling.master_seed;
  report.coverage = set.coverage;
  report.retained_targets = set.targets.size();
  report.retained_pairs = set.pairs.size();
  report.warnings = set.warnings;
  report.timestamp = UtcTimestamp();
  report.host = HostName();

  auto priors = std::make_shared<PriorLookup>();
  for (const TargetRecord& t : set.targets) {
    priors->emplace(t.target_id, t.prior_scope);
  }

  const std::vector<Operator> ops = config.sampling.CanonicalOperators();
  const size_t expected_scored = 2 * config.sampling.n_pairs_per_input *
                                 ops.size() * set.pairs.size();

  for (const ModelSpec& spec : config.models) {
    ModelReport m;
    m.name = spec.name;
    m.expected_scored_interventions = expected_scored;
    report.models.push_back(std::move(m));
  }

  std::vector<MetricTable> geometry_runs;
  std::vector<std::vector<MetricTable>> overall_runs(config.models.size());
  std::vector<std::map<std::string, std::vector<MetricTable>>> operator_runs(
      config.models.size());
  std::vector<std::vector<MetricTable>> auroc_runs(config.models.size());
  bool warned_auroc = false;

  for (uint32_t run = 0; run < config.n_runs; ++run) {
    SamplingPlan plan = config.sampling;
    plan.master_seed = config.sampling.master_seed + run;
    BootstrapConfig boot = config.bootstrap;
    boot.seed = DeriveSeed({config.sampling.master_seed, config.bootstrap.seed, run});
    report.run_seeds.push_back({plan.master_seed, boot.seed});

    // Interventions are realized once per run and shared by every model.
    std::vector<MatchedPair> run_pairs;
    std::vector<std::string> mech_seqs;
    std::vector<std::string> spur_seqs;
    std::map<std::string, std::pair<size_t, size_t>, std::less<>> ranges;
    for (const TargetRecord& t : set.targets) {
      const size_t begin = run_pairs.size();
      for (MatchedPair& p : SampleMatchedPairs(t, plan)) {
        CheckMatchedPair(t, p);
        mech_seqs.push_back(ApplyIntervention(t.sequence, p.mech));
        spur_seqs.push_back(ApplyIntervention(t.sequence, p.spur));
        run_pairs.push_back(std::move(p));
      }
      ranges.emplace(t.target_id, std::make_pair(begin, run_pairs.size()));
    }
    const GeometryStats g = GeometrySummary(run_pairs);
    geometry_runs.push_back(
        PointTable({{"mean_spread_mech", g.mean_spread_mech},
                    {"mean_spread_spur", g.mean_spread_spur},
                    {"mean_contiguity_mech", g.mean_contiguity_mech},
                    {"mean_contiguity_spur", g.mean_contiguity_spur}}));

    for (size_t mi = 0; mi < config.models.size(); ++mi) {
      const ModelSpec& spec = config.models[mi];
      ModelReport& model = report.models[mi];
      std::unique_ptr<ScoringEndpoint> endpoint =
          MakeEndpoint(spec, plan.master_seed, priors);
      model.identity = endpoint->identity();
      model.kind = endpoint->kind();

      // Request layout per pair: reference, then (mech, spur) per MatchedPair.
      std::vector<ScoreRequest> requests;
      uint64_t digest = HashString("");
      for (const PairRecord& p : set.pairs) {
        const TargetRecord& t = *set.FindTarget(p.target_id);
        const auto [begin, end] = ranges.at(p.target_id);
        requests.push_back({p.pair_id + "#ref", p.drug, t.sequence, t.target_id});
        for (size_t j = begin; j < end; ++j) {
          const MatchedPair& mp = run_pairs[j];
          requests.push_back({p.pair_id + "#" + mp.mech.intervention_id, p.drug,
                              mech_seqs[j], t.target_id});
          requests.push_back({p.pair_id + "#" + mp.spur.intervention_id, p.drug,
                              spur_seqs[j], t.target_id});
          digest = DeriveSeed({digest, HashString(mp.mech.intervention_id),
                               HashString(mech_seqs[j]),
                               HashString(mp.spur.intervention_id),
                               HashString(spur_seqs[j])});
        }
      }
      CachingScorer scorer(*endpoint);
      const std::vector<double> scores = scorer.Score(requests);
      model.endpoint_calls += scorer.endpoint_calls();
      model.intervention_digests.push_back(HexDigest(digest));

      std::vector<ResponseSet> responses;
      std::map<Operator, std::vector<ResponseSet>> by_op;
      std::vector<double> labeled_scores;
      std::vector<int> labels;
      size_t scored = 0;
      size_t cursor = 0;
      for (const PairRecord& p : set.pairs) {
        const auto [begin, end] = ranges.at(p.target_id);
        const double reference = scores[cursor++];
        if (p.label) {
          labeled_scores.push_back(reference);
          labels.push_back(*p.label);
        }
        std::vector<ScoredIntervention> all;
        std::map<Operator, std::vector<ScoredIntervention>> per_op;
        for (size_t j = begin; j < end; ++j) {
          const MatchedPair& mp = run_pairs[j];
          ScoredIntervention mech{p.pair_id, mp.mech.intervention_id,
                                  ScopeClass::kMechanistic, mp.mech.op,
                                  scores[cursor++]};
          ScoredIntervention spur{p.pair_id, mp.spur.intervention_id,
                                  ScopeClass::kSpurious, mp.spur.op,
                                  scores[cursor++]};
          per_op[mp.mech.op].push_back(mech);
          per_op[mp.mech.op].push_back(spur);
          all.push_back(std::move(mech));
          all.push_back(std::move(spur));
        }
        scored += all.size();
        responses.push_back(ResponseDifferences(reference, all));
        for (const auto& [op, items] : per_op) {
          by_op[op].push_back(ResponseDifferences(reference, items));
        }
      }
      if (scored != expected_scored) {
        throw AuditError("model " + spec.name + ": scored " +
                         std::to_string(scored) + " interventions, expected " +
                         std::to_string(expected_scored));
      }
      model.scored_interventions = scored;

      const std::vector<MetricWithCI> cis =
          HierarchicalBootstrap(responses, ModelMetricVector, boot);
      MetricTable overall;
      for (size_t k = 0; k < kMetricNames.size(); ++k) {
        overall[kMetricNames[k]] = cis[k];
      }
      overall_runs[mi].push_back(std::move(overall));
      model.msr_excluded.push_back(ComputeModelMetrics(responses).msr_excluded);

      if (config.emit.operator_stratification) {
        for (const auto& [op, op_responses] : by_op) {
          const MetricFn rs_mean = [](std::span<const ResponseSet> s) {
            return ComputeModelMetrics(s).rs_mean;
          };
          operator_runs[mi][std::string(ToString(op))].push_back(
              {{"rs", HierarchicalBootstrap(op_responses, rs_mean, boot)}});
        }
      }

      const bool has_both =
          std::count(labels.begin(), labels.end(), 1) > 0 &&
          std::count(labels.begin(), labels.end(), 0) > 0;
      if (has_both) {
        const double auc = Auroc(labeled_scores, labels);
        auroc_runs[mi].push_back({{"auroc", {auc, auc, auc}}});
        model.auroc_pairs = labels.size();
      } else if (!warned_auroc) {
        report.warnings.push_back(
            "AUROC not reported: labeled pairs do not contain both classes");
        warned_auroc = true;
      }

      std::vector<PerInputMetrics> per_input;
      per_input.reserve(responses.size());
      for (const ResponseSet& r : responses) {
        per_input.push_back(ComputeInputMetrics(r));
      }
      model.per_input.push_back(std::move(per_input));
      model.responses.push_back(std::move(responses));
    }
    report.interventions.push_back(std::move(run_pairs));
  }

  report.geometry = AggregateRuns(geometry_runs);
  for (size_t mi = 0; mi < config.models.size(); ++mi) {
    ModelReport& model = report.models[mi];
    model.metrics = AggregateRuns(overall_runs[mi]);
    for (const auto& [op, runs] : operator_runs[mi]) {
      model.by_operator[op] = AggregateRuns(runs);
    }
    if (auroc_runs[mi].size() == config.n_runs) {
      model.auroc = AggregateRuns(auroc_runs[mi]).at("auroc");
    }
  }
  return report;
}

json ReportToJson(const AuditReport& report, bool include_provenance) {
  size_t matched = 0;
  size_t total = 0;
  for (const auto& run : report.interventions) {
    for (const MatchedPair& p : run) {
      ++total;
      matched += p.mech.scope.size() == p.spur.scope.size();
    }
  }

  json seeds = json::array();
  for (size_t r = 0; r < report.run_seeds.size(); ++r) {
    seeds.push_back({{"run", r},
                     {"sampling_seed", report.run_seeds[r].sampling},
                     {"bootstrap_seed", report.run_seeds[r].bootstrap}});
  }

  json models = json::array();
  for (const ModelReport& m : report.models) {
    json ops = json::object();
    for (const auto& [op, table] : m.by_operator) ops[op] = ToJson(table);
    models.push_back(
        {{"name", m.name},
         {"identity", m.identity},
         {"kind", m.kind == EndpointKind::kInProcessOracle ? "in_process_oracle"
                                                           : "external_process"},
         {"metrics", ToJson(m.metrics)},
         {"operators", std::move(ops)},
         {"auroc", m.auroc ? ToJson(*m.auroc) : json(nullptr)},
         {"auroc_pairs", m.auroc_pairs},
         {"msr_excluded", m.msr_excluded},
         {"scored_interventions", m.scored_interventions},
         {"expected_scored_interventions", m.expected_scored_interventions},
         {"endpoint_calls", m.endpoint_calls},
         {"intervention_digests", m.intervention_digests}});
  }

  const CoverageStats& c = report.coverage;
  json doc = {
      {"schema_version", kReportSchema},
      {"toolkit_version", kToolkitVersion},
      {"config", report.config},
      {"seeds", {{"master_seed", report.master_seed}, {"runs", std::move(seeds)}}},
      {"coverage",
       {{"n_targets_total", c.n_targets_total},
        {"n_with_prior", c.n_with_prior},
        {"n_realizable", c.n_realizable},
        {"median_prior_size", Num(c.median_prior_size)},
        {"iqr_prior_size", Num(c.iqr_prior_size)}}},
      {"design",
       {{"retained_targets", report.retained_targets},
        {"retained_pairs", report.retained_pairs},
        {"matched_pairs", total},
        {"cardinality_matched_fraction",
         total == 0 ? json(nullptr)
                    : json(static_cast<double>(matched) /
                           static_cast<double>(total))}}},
      {"geometry", ToJson(report.geometry)},
      {"models", std::move(models)},
      {"warnings", report.warnings}};
  if (include_provenance) {
    doc["provenance"] = {{"timestamp", report.timestamp}, {"host", report.host}};
  }
  return doc;
}

std::vector<std::filesystem::path> EmitReport(const AuditReport& report,
                                              const RunConfig& config,
                                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw AuditError("unwritable output directory " + dir.string());
  }
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw AuditError("cannot write " + path.string());
    written.push_back(path);
    return out;
  };
  auto close = [](std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw AuditError("error writing " + path.string());
  };

  {
    const auto path = dir / "report.json";
    std::ofstream out = open(path);
    out << ReportToJson(report).dump(2) << '\n';
    close(out, path);
  }
  {
    const auto path = dir / "table1_coverage.csv";
    std::ofstream out = open(path);
    const json design = ReportToJson(report, false)["design"];
    const CoverageStats& c = report.coverage;
    out << "statistic,value\n"
        << "targets_total," << c.n_targets_total << '\n'
        << "targets_with_prior," << c.n_with_prior << '\n'
        << "targets_realizable," << c.n_realizable << '\n'
        << "median_prior_residues," << Csv(c.median_prior_size) << '\n'
        << "iqr_prior_residues," << Csv(c.iqr_prior_size) << '\n'
        << "retained_pairs," << report.retained_pairs << '\n'
        << "cardinality_matched_fraction,"
        << Csv(design["cardinality_matched_fraction"].is_null()
                   ? NAN
                   : design["cardinality_matched_fraction"].get<double>())
        << '\n';
    close(out, path);
  }
  {
    const auto path = dir / "table2_auroc.csv";
    std::ofstream out = open(path);
    out << "model,auroc,auroc_std,labeled_pairs\n";
    for (const ModelReport& m : report.models) {
      out << m.name << ',' << (m.auroc ? Csv(m.auroc->mean) : "NA") << ','
          << (m.auroc ? Csv(m.auroc->std) : "NA") << ',' << m.auroc_pairs
          << '\n';
    }
    close(out, path);
  }
  {
    const auto path = dir / "table3_metrics.csv";
    std::ofstream out = open(path);
    out << "model";
    for (const char* name : {"rs", "c_sep", "overlap"}) {
      out << ',' << name << ',' << name << "_ci_low," << name << "_ci_high";
    }
    out << '\n';
    for (const ModelReport& m : report.models) {
      out << m.name;
      for (const char* name : {"rs", "c_sep", "overlap"}) {
        const AggregatedMetric& a = m.metrics.at(name);
        out << ',' << Csv(a.mean) << ',' << Csv(a.ci_low) << ','
            << Csv(a.ci_high);
      }
      out << '\n';
    }
    close(out, path);
  }
  if (config.emit.operator_stratification) {
    const auto path = dir / "table4_operators.csv";
    std::ofstream out = open(path);
    out << "model,operator,rs,rs_ci_low,rs_ci_high\n";
    for (const ModelReport& m : report.models) {
      for (const auto& [op, table] : m.by_operator) {
        const AggregatedMetric& a = table.at("rs");
        out << m.name << ',' << op << ',' << Csv(a.mean) << ','
            << Csv(a.ci_low) << ',' << Csv(a.ci_high) << '\n';
      }
    }
    close(out, path);
  }
  {
    const auto path = dir / "table5_geometry.csv";
    std::ofstream out = open(path);
    out << "scope_type,mean_positional_spread,mean_contiguity\n"
        << "mechanistic," << Csv(report.geometry.at("mean_spread_mech").mean)
        << ',' << Csv(report.geometry.at("mean_contiguity_mech").mean) << '\n'
        << "spurious," << Csv(report.geometry.at("mean_spread_spur").mean)
        << ',' << Csv(report.geometry.at("mean_contiguity_spur").mean) << '\n';
    close(out, path);
  }
  {
    const auto path = dir / "directional.csv";
    std::ofstream out = open(path);
    out << "model,sc_mean,sc_std,msr_mean,msr_std,md_mean,md_std,"
           "msr_excluded\n";
    for (const ModelReport& m : report.models) {
      out << m.name;
      for (const char* name : {"sc", "msr", "md"}) {
        const AggregatedMetric& a = m.metrics.at(name);
        out << ',' << Csv(a.mean) << ',' << Csv(a.std);
      }
      size_t excluded = 0;
      for (size_t e : m.msr_excluded) excluded += e;
      out << ',' << excluded << '\n';
    }
    close(out, path);
  }
  if (config.emit.per_input) {
    const auto path = dir / "per_input.csv";
    std::ofstream out = open(path);
    out << "model,run,pair_id,m_mech,m_spur,rs,sc,msr,md\n";
    for (const ModelReport& m : report.models) {
      for (size_t r = 0; r < m.per_input.size(); ++r) {
        for (const PerInputMetrics& x : m.per_input[r]) {
          out << m.name << ',' << r << ',' << x.pair_id << ',' << Csv(x.m_mech)
              << ',' << Csv(x.m_spur) << ',' << Csv(x.rs) << ',' << Csv(x.sc)
              << ',' << (x.msr ? Csv(*x.msr) : "NA") << ',' << (x.md ? 1 : 0)
              << '\n';
        }
      }
    }
    close(out, path);
  }
  if (config.emit.dump_interventions) {
    const auto sub = dir / "interventions";
    std::filesystem::create_directories(sub, ec);
    if (ec) throw AuditError("unwritable output directory " + sub.string());
    for (const ModelReport& m : report.models) {
      for (size_t r = 0; r < report.interventions.size(); ++r) {
        const auto path = sub / (m.name + ".run" + std::to_string(r) + ".tsv");
        std::ofstream out = open(path);
        WriteInterventionDump(out, report.interventions[r]);
        close(out, path);
      }
    }
  }
  return written;
}

}  // namespace isaac
