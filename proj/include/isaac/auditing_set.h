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

// Ingestion of target and pair tables, the realizability filter, and the
// compiled auditing set with its coverage statistics.
//
// targets file (TSV, UTF-8):
//   target_id  sequence  prior_indices  prior_residues
// prior_indices is a comma-separated ascending list of 1-based integers;
// prior_residues is empty or a comma-separated list of index:letter.
//
// pairs file (TSV, UTF-8):
//   pair_id  drug  target_id  label
// label is empty, 0 or 1.

#ifndef ISAAC_AUDITING_SET_H_
#define ISAAC_AUDITING_SET_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "isaac/types.h"
#include "json.hpp"

namespace isaac {

inline constexpr std::string_view kAuditingSetSchema = "isaac.auditing_set/1";

struct CoverageStats {
  size_t n_targets_total = 0;
  size_t n_with_prior = 0;
  size_t n_realizable = 0;
  double median_prior_size = 0.0;
  double iqr_prior_size = 0.0;

  friend bool operator==(const CoverageStats&, const CoverageStats&) = default;
};

struct AuditingSet {
  std::vector<TargetRecord> targets;  // sorted by target_id
  std::vector<PairRecord> pairs;      // sorted by pair_id
  CoverageStats coverage;
  std::vector<std::string> warnings;

  const TargetRecord* FindTarget(std::string_view target_id) const;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  std::vector<std::string> warnings;
};

// Rows failing validation are excluded and reported as warnings with their
// line numbers. A missing or malformed header throws AuditError.
LoadResult<TargetRecord> ParseTargets(std::istream& in,
                                      std::string_view source = "<targets>");
LoadResult<TargetRecord> LoadTargets(const std::filesystem::path& path);
LoadResult<PairRecord> ParsePairs(std::istream& in,
                                  std::string_view source = "<pairs>");
LoadResult<PairRecord> LoadPairs(const std::filesystem::path& path);

struct Realizability {
  bool realizable = false;
  std::string reason;  // empty when realizable

  explicit operator bool() const { return realizable; }
};

// `max_scope_cardinality` is the largest mechanistic scope the run will draw
// for this target; the off-prior complement must be at least that large.
Realizability IsRealizable(const TargetRecord& record,
                           size_t max_scope_cardinality);

struct CompileConfig {
  double scope_fraction = 0.25;
};

// Keeps exactly the realizable targets and the pairs referencing them. The
// result does not depend on input ordering. Throws AuditError when nothing
// survives or identifiers collide.
AuditingSet Compile(std::vector<TargetRecord> targets,
                    std::vector<PairRecord> pairs, const CompileConfig& config);

// Median and IQR of prior sizes over the retained targets. The count fields
// are carried over from `set.coverage`.
CoverageStats CoverageSummary(const AuditingSet& set);

nlohmann::json ToJson(const AuditingSet& set);
AuditingSet AuditingSetFromJson(const nlohmann::json& doc);
void SaveAuditingSet(const AuditingSet& set, const std::filesystem::path& path);
AuditingSet LoadAuditingSet(const std::filesystem::path& path);

}  // namespace isaac

#endif  // ISAAC_AUDITING_SET_H_
