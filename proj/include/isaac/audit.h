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

// End-to-end audit orchestration: configuration, the audit pipeline and the
// report it produces.

#ifndef ISAAC_AUDIT_H_
#define ISAAC_AUDIT_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isaac/auditing_set.h"
#include "isaac/bootstrap.h"
#include "isaac/intervention.h"
#include "isaac/metrics.h"
#include "isaac/scoring.h"
#include "json.hpp"

namespace isaac {

inline constexpr std::string_view kToolkitVersion = "0.1.0";
inline constexpr std::string_view kReportSchema = "isaac.audit_report/1";

struct ModelSpec {
  std::string name;  // [A-Za-z0-9_.-]+, used in file names
  std::optional<OracleKind> oracle;
  std::string command;  // external scorer when `oracle` is empty
  size_t batch_size = 256;
  std::chrono::milliseconds timeout{120000};
  // score -> scale * score + offset, applied on top of the endpoint.
  std::optional<std::pair<double, double>> affine;
};

// "name=oracle:<kind>" or "name=<shell command>".
ModelSpec ParseModelFlag(std::string_view flag);

struct EmitFlags {
  bool dump_interventions = false;
  bool per_input = false;
  bool operator_stratification = true;
};

struct RunConfig {
  std::filesystem::path targets_path;
  std::filesystem::path pairs_path;
  std::filesystem::path auditing_set_path;  // alternative to the two tables
  std::vector<ModelSpec> models;
  SamplingPlan sampling;
  BootstrapConfig bootstrap;
  uint32_t n_runs = 1;
  std::filesystem::path output_dir = "isaac_out";
  EmitFlags emit;

  void Validate() const;
};

// Relative paths in the document resolve against `base_dir`.
RunConfig RunConfigFromJson(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
// Echo used in reports. The output directory is left out so that reports
// written to different places compare equal.
nlohmann::json ToJson(const RunConfig& config);

// Creates the scoring endpoint for one model. Oracles are seeded with
// `seed` and read priors from `priors`.
std::unique_ptr<ScoringEndpoint> MakeEndpoint(
    const ModelSpec& spec, uint64_t seed,
    std::shared_ptr<const PriorLookup> priors);

struct RunSeeds {
  uint64_t sampling = 0;
  uint64_t bootstrap = 0;
};

struct ModelReport {
  std::string name;
  std::string identity;
  EndpointKind kind = EndpointKind::kInProcessOracle;
  // rs, c_sep, overlap, sc, msr, md.
  std::map<std::string, AggregatedMetric> metrics;
  // operator name -> {"rs": ...}.
  std::map<std::string, std::map<std::string, AggregatedMetric>> by_operator;
  std::optional<AggregatedMetric> auroc;
  size_t auroc_pairs = 0;
  std::vector<size_t> msr_excluded;  // per run
  size_t scored_interventions = 0;   // per run
  size_t expected_scored_interventions = 0;
  size_t endpoint_calls = 0;  // summed over runs, after caching
  std::vector<std::string> intervention_digests;  // per run
  std::vector<std::vector<PerInputMetrics>> per_input;  // per run
  std::vector<std::vector<ResponseSet>> responses;      // per run
};

struct AuditReport {
  nlohmann::json config;
  uint64_t master_seed = 0;
  std::vector<RunSeeds> run_seeds;
  CoverageStats coverage;
  size_t retained_targets = 0;
  size_t retained_pairs = 0;
  std::map<std::string, AggregatedMetric> geometry;
  std::vector<std::vector<MatchedPair>> interventions;  // per run
  std::vector<ModelReport> models;
  std::vector<std::string> warnings;
  // Excluded from determinism comparisons.
  std::string timestamp;
  std::string host;
};

// compile -> sample -> intervene -> score -> deltas -> metrics -> bootstrap
// -> aggregate. Throws AuditError with context on any fatal condition.
AuditReport RunAudit(const RunConfig& config);

// Same pipeline on an already compiled auditing set.
AuditReport RunAudit(const RunConfig& config, const AuditingSet& set);

// Canonical JSON document. `include_provenance` = false drops the
// timestamp/host block for byte-level determinism checks.
nlohmann::json ReportToJson(const AuditReport& report,
                            bool include_provenance = true);

// Writes report.json, the CSV tables and optional per-input and
// intervention dumps into `dir`. Returns the written paths.
std::vector<std::filesystem::path> EmitReport(const AuditReport& report,
                                              const RunConfig& config,
                                              const std::filesystem::path& dir);

}  // namespace isaac

#endif  // ISAAC_AUDIT_H_
