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

// Command-line auditor. Runs a full interventional audit from a JSON config
// and/or flags and writes report.json plus CSV tables.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isaac/audit.h"

namespace {

std::vector<isaac::Operator> ParseOperatorList(const std::string& list) {
  std::vector<isaac::Operator> ops;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t comma = list.find(',', start);
    const std::string tok = list.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) ops.push_back(isaac::ParseOperator(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ops;
}

void PrintSummary(const isaac::AuditReport& report) {
  std::printf("targets %zu/%zu realizable, %zu pairs audited\n",
              report.coverage.n_realizable, report.coverage.n_targets_total,
              report.retained_pairs);
  std::printf("%-24s %8s %8s %8s %8s %8s %8s %8s\n", "model", "RS", "C_sep",
              "Overlap", "SC", "MSR", "MD", "AUROC");
  for (const isaac::ModelReport& m : report.models) {
    std::printf("%-24s", m.name.c_str());
    for (const char* name : {"rs", "c_sep", "overlap", "sc", "msr", "md"}) {
      std::printf(" %8.3f", m.metrics.at(name).mean);
    }
    if (m.auroc) {
      std::printf(" %8.3f\n", m.auroc->mean);
    } else {
      std::printf(" %8s\n", "NA");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAAC interventional auditor for sequence-based predictors"};

  std::string config_path, targets, pairs, auditing_set, out, operators;
  std::vector<std::string> models;
  std::optional<uint64_t> seed;
  std::optional<double> scope_fraction, ci_level;
  std::optional<uint32_t> pairs_per_input, runs;
  std::optional<size_t> bootstrap_reps;
  bool dump = false, per_input = false, quiet = false;

  app.add_option("--config", config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--targets", targets, "targets TSV");
  app.add_option("--pairs", pairs, "pairs TSV");
  app.add_option("--auditing-set", auditing_set,
                 "compiled auditing set JSON (instead of --targets/--pairs)");
  app.add_option("--model", models,
                 "name=oracle:<kind> or name=<scorer command>; repeatable, "
                 "replaces the config's model list");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--scope-fraction", scope_fraction,
                 "mechanistic scope size as a fraction of the prior");
  app.add_option("--pairs-per-input", pairs_per_input,
                 "matched pairs per input and operator");
  app.add_option("--operators", operators, "comma list: mask,substitution");
  app.add_option("--bootstrap-reps", bootstrap_reps, "bootstrap replicates");
  app.add_option("--ci-level", ci_level, "confidence level");
  app.add_option("--runs", runs, "independent runs (seeds seed..seed+runs-1)");
  app.add_option("--out", out, "output directory");
  app.add_flag("--dump-interventions", dump, "write intervention replay dumps");
  app.add_flag("--per-input", per_input, "write per-input metrics CSV");
  app.add_flag("-q,--quiet", quiet, "suppress the summary table");
  CLI11_PARSE(app, argc, argv);

  try {
    isaac::RunConfig config = config_path.empty()
                                  ? isaac::RunConfig{}
                                  : isaac::LoadRunConfig(config_path);
    if (!targets.empty()) config.targets_path = targets;
    if (!pairs.empty()) config.pairs_path = pairs;
    if (!auditing_set.empty()) config.auditing_set_path = auditing_set;
    if (!models.empty()) {
      config.models.clear();
      for (const std::string& m : models) {
        config.models.push_back(isaac::ParseModelFlag(m));
      }
    }
    if (seed) config.sampling.master_seed = *seed;
    if (scope_fraction) config.sampling.scope_fraction = *scope_fraction;
    if (pairs_per_input) config.sampling.n_pairs_per_input = *pairs_per_input;
    if (!operators.empty()) config.sampling.operators = ParseOperatorList(operators);
    if (bootstrap_reps) config.bootstrap.n_replicates = *bootstrap_reps;
    if (ci_level) config.bootstrap.ci_level = *ci_level;
    if (runs) config.n_runs = *runs;
    if (!out.empty()) config.output_dir = out;
    if (dump) config.emit.dump_interventions = true;
    if (per_input) config.emit.per_input = true;

    const isaac::AuditReport report = isaac::RunAudit(config);
    for (const std::string& w : report.warnings) {
      std::cerr << "warning: " << w << '\n';
    }
    isaac::EmitReport(report, config, config.output_dir);
    if (!quiet) PrintSummary(report);
    std::cerr << "report written to " << config.output_dir.string() << '\n';
  } catch (const isaac::AuditError& e) {
    std::cerr << "isaac_audit: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
