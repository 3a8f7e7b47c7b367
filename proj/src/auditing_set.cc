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

#include "isaac/auditing_set.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "isaac/metrics.h"

namespace isaac {
namespace {

using nlohmann::json;

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<ResidueIndex> ParseIndex(std::string_view s) {
  s = Trim(s);
  ResidueIndex v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::string Where(std::string_view source, size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

// Reads the header line and checks it against `expected`.
void ExpectHeader(std::istream& in, std::string_view source,
                  const std::vector<std::string_view>& expected) {
  std::string header;
  if (!std::getline(in, header)) {
    throw AuditError(std::string(source) + ": missing header line");
  }
  if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header.erase(0, 3);
  }
  std::vector<std::string_view> cols = Split(Trim(header), '\t');
  for (auto& c : cols) c = Trim(c);
  if (cols != expected) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : "\\t") + std::string(e);
    throw AuditError(std::string(source) + ": malformed header, expected '" +
                     want + "'");
  }
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AuditError("cannot read " + path.string());
  return in;
}

}  // namespace

const TargetRecord* AuditingSet::FindTarget(std::string_view target_id) const {
  auto it = std::lower_bound(
      targets.begin(), targets.end(), target_id,
      [](const TargetRecord& t, std::string_view id) { return t.target_id < id; });
  if (it == targets.end() || it->target_id != target_id) return nullptr;
  return &*it;
}

LoadResult<TargetRecord> ParseTargets(std::istream& in,
                                      std::string_view source) {
  ExpectHeader(in, source,
               {"target_id", "sequence", "prior_indices", "prior_residues"});
  LoadResult<TargetRecord> out;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string_view> cols = Split(Trim(line), '\t');
    if (cols.size() != 4) {
      out.warnings.push_back(Where(source, line_no) + "expected 4 columns, got " +
                             std::to_string(cols.size()) + "; row excluded");
      continue;
    }
    TargetRecord rec;
    rec.target_id = std::string(Trim(cols[0]));
    rec.sequence = std::string(Trim(cols[1]));
    std::string problem;
    if (const std::string_view idx = Trim(cols[2]); !idx.empty()) {
      for (std::string_view tok : Split(idx, ',')) {
        const auto v = ParseIndex(tok);
        if (!v) {
          problem = "unparsable prior index '" + std::string(tok) + "'";
          break;
        }
        rec.prior_scope.push_back(*v);
      }
    }
    if (const std::string_view res = Trim(cols[3]); problem.empty() && !res.empty()) {
      rec.prior_residues.emplace();
      for (std::string_view tok : Split(res, ',')) {
        const size_t colon = tok.find(':');
        const auto v = colon == std::string_view::npos
                           ? std::nullopt
                           : ParseIndex(tok.substr(0, colon));
        const std::string_view letter =
            v ? Trim(tok.substr(colon + 1)) : std::string_view{};
        if (!v || letter.size() != 1) {
          problem = "unparsable prior residue '" + std::string(tok) + "'";
          break;
        }
        rec.prior_residues->emplace(*v, letter.front());
      }
    }
    if (problem.empty()) {
      if (const ValidationResult vr = ValidateTarget(rec); !vr.ok()) {
        problem = vr.Summary();
      }
    }
    if (!problem.empty()) {
      out.warnings.push_back(Where(source, line_no) + "target '" +
                             rec.target_id + "': " + problem + "; row excluded");
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) {
    out.warnings.push_back(std::string(source) + ": no target rows");
  }
  return out;
}

LoadResult<TargetRecord> LoadTargets(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseTargets(in, path.string());
}

LoadResult<PairRecord> ParsePairs(std::istream& in, std::string_view source) {
  ExpectHeader(in, source, {"pair_id", "drug", "target_id", "label"});
  LoadResult<PairRecord> out;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    // A trailing empty label may be stripped by editors, so 3 columns is fine.
    std::vector<std::string_view> cols = Split(Trim(line), '\t');
    if (cols.size() == 3) cols.emplace_back();
    if (cols.size() != 4) {
      out.warnings.push_back(Where(source, line_no) + "expected 4 columns, got " +
                             std::to_string(cols.size()) + "; row excluded");
      continue;
    }
    PairRecord rec{std::string(Trim(cols[0])), std::string(Trim(cols[1])),
                   std::string(Trim(cols[2])), std::nullopt};
    const std::string_view label = Trim(cols[3]);
    if (label == "0" || label == "1") {
      rec.label = label == "1" ? 1 : 0;
    } else if (!label.empty()) {
      out.warnings.push_back(Where(source, line_no) + "pair '" + rec.pair_id +
                             "': label must be empty, 0 or 1; row excluded");
      continue;
    }
    if (rec.pair_id.empty() || rec.target_id.empty()) {
      out.warnings.push_back(Where(source, line_no) +
                             "empty pair_id or target_id; row excluded");
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) {
    out.warnings.push_back(std::string(source) + ": no pair rows");
  }
  return out;
}

LoadResult<PairRecord> LoadPairs(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParsePairs(in, path.string());
}

Realizability IsRealizable(const TargetRecord& record,
                           size_t max_scope_cardinality) {
  if (record.prior_scope.empty()) return {false, "empty prior"};
  const size_t m = record.sequence.size();
  for (ResidueIndex i : record.prior_scope) {
    if (i < 1 || i > m) {
      return {false, "index out of range: " + std::to_string(i)};
    }
  }
  if (record.prior_residues) {
    for (ResidueIndex i : record.prior_scope) {
      auto it = record.prior_residues->find(i);
      if (it == record.prior_residues->end() ||
          record.sequence[i - 1] != it->second) {
        return {false, "residue mismatch at " + std::to_string(i)};
      }
    }
  }
  const std::set<ResidueIndex> unique(record.prior_scope.begin(),
                                      record.prior_scope.end());
  const size_t complement = m - unique.size();
  if (complement == 0) return {false, "empty complement"};
  if (complement < max_scope_cardinality) {
    return {false, "complement of size " + std::to_string(complement) +
                       " smaller than scope cardinality " +
                       std::to_string(max_scope_cardinality)};
  }
  return {true, {}};
}

AuditingSet Compile(std::vector<TargetRecord> targets,
                    std::vector<PairRecord> pairs, const CompileConfig& config) {
  if (!(config.scope_fraction > 0.0 && config.scope_fraction <= 1.0)) {
    throw AuditError("scope_fraction must lie in (0, 1]");
  }
  std::sort(targets.begin(), targets.end(),
            [](const TargetRecord& a, const TargetRecord& b) {
              return a.target_id < b.target_id;
            });
  for (size_t i = 1; i < targets.size(); ++i) {
    if (targets[i].target_id == targets[i - 1].target_id) {
      throw AuditError("duplicate target_id '" + targets[i].target_id + "'");
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const PairRecord& a, const PairRecord& b) {
              return a.pair_id < b.pair_id;
            });
  for (size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].pair_id == pairs[i - 1].pair_id) {
      throw AuditError("duplicate pair_id '" + pairs[i].pair_id + "'");
    }
  }

  std::set<std::string> all_ids;
  for (const TargetRecord& t : targets) all_ids.insert(t.target_id);

  AuditingSet set;
  set.coverage.n_targets_total = targets.size();
  for (TargetRecord& t : targets) {
    if (!t.prior_scope.empty()) ++set.coverage.n_with_prior;
    const size_t k = ScopeCardinality(t.prior_scope.size(), config.scope_fraction);
    if (const Realizability r = IsRealizable(t, k); !r) {
      set.warnings.push_back("target '" + t.target_id +
                             "' not realizable: " + r.reason);
      continue;
    }
    set.targets.push_back(std::move(t));
  }
  set.coverage.n_realizable = set.targets.size();
  if (set.targets.empty()) throw AuditError("auditing set empty");

  for (PairRecord& p : pairs) {
    if (set.FindTarget(p.target_id) == nullptr) {
      set.warnings.push_back(
          "pair '" + p.pair_id + "' dropped: target '" + p.target_id + "' " +
          (all_ids.contains(p.target_id) ? "not realizable" : "unknown"));
      continue;
    }
    set.pairs.push_back(std::move(p));
  }

  const CoverageStats sizes = CoverageSummary(set);
  set.coverage.median_prior_size = sizes.median_prior_size;
  set.coverage.iqr_prior_size = sizes.iqr_prior_size;
  return set;
}

CoverageStats CoverageSummary(const AuditingSet& set) {
  CoverageStats out = set.coverage;
  if (set.targets.empty()) return out;
  std::vector<double> sizes;
  sizes.reserve(set.targets.size());
  for (const TargetRecord& t : set.targets) {
    sizes.push_back(static_cast<double>(t.prior_scope.size()));
  }
  out.median_prior_size = Median(sizes);
  out.iqr_prior_size = InterquartileRange(sizes);
  return out;
}

nlohmann::json ToJson(const AuditingSet& set) {
  json targets = json::array();
  for (const TargetRecord& t : set.targets) {
    json rec = {{"target_id", t.target_id},
                {"sequence", t.sequence},
                {"prior_indices", t.prior_scope}};
    if (t.prior_residues) {
      json residues = json::object();
      for (const auto& [i, c] : *t.prior_residues) {
        residues[std::to_string(i)] = std::string(1, c);
      }
      rec["prior_residues"] = std::move(residues);
    } else {
      rec["prior_residues"] = nullptr;
    }
    targets.push_back(std::move(rec));
  }
  json pairs = json::array();
  for (const PairRecord& p : set.pairs) {
    pairs.push_back({{"pair_id", p.pair_id},
                     {"drug", p.drug},
                     {"target_id", p.target_id},
                     {"label", p.label ? json(*p.label) : json(nullptr)}});
  }
  const CoverageStats& c = set.coverage;
  return {{"schema", kAuditingSetSchema},
          {"targets", std::move(targets)},
          {"pairs", std::move(pairs)},
          {"coverage",
           {{"n_targets_total", c.n_targets_total},
            {"n_with_prior", c.n_with_prior},
            {"n_realizable", c.n_realizable},
            {"median_prior_size", c.median_prior_size},
            {"iqr_prior_size", c.iqr_prior_size}}},
          {"warnings", set.warnings}};
}

AuditingSet AuditingSetFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kAuditingSetSchema) {
      throw AuditError("unsupported auditing set schema '" +
                       doc.at("schema").get<std::string>() + "'");
    }
    AuditingSet set;
    for (const json& rec : doc.at("targets")) {
      TargetRecord t;
      t.target_id = rec.at("target_id").get<std::string>();
      t.sequence = rec.at("sequence").get<std::string>();
      t.prior_scope = rec.at("prior_indices").get<std::vector<ResidueIndex>>();
      if (const json& r = rec.at("prior_residues"); !r.is_null()) {
        t.prior_residues.emplace();
        for (const auto& [key, letter] : r.items()) {
          const auto i = ParseIndex(key);
          const auto s = letter.get<std::string>();
          if (!i || s.size() != 1) {
            throw AuditError("bad prior_residues entry for " + t.target_id);
          }
          t.prior_residues->emplace(*i, s.front());
        }
      }
      if (const ValidationResult vr = ValidateTarget(t); !vr.ok()) {
        throw AuditError("target '" + t.target_id + "': " + vr.Summary());
      }
      set.targets.push_back(std::move(t));
    }
    for (const json& rec : doc.at("pairs")) {
      PairRecord p;
      p.pair_id = rec.at("pair_id").get<std::string>();
      p.drug = rec.at("drug").get<std::string>();
      p.target_id = rec.at("target_id").get<std::string>();
      if (!rec.at("label").is_null()) p.label = rec.at("label").get<int>();
      set.pairs.push_back(std::move(p));
    }
    const json& c = doc.at("coverage");
    set.coverage = {c.at("n_targets_total").get<size_t>(),
                    c.at("n_with_prior").get<size_t>(),
                    c.at("n_realizable").get<size_t>(),
                    c.at("median_prior_size").get<double>(),
                    c.at("iqr_prior_size").get<double>()};
    if (doc.contains("warnings")) {
      set.warnings = doc.at("warnings").get<std::vector<std::string>>();
    }
    std::sort(set.targets.begin(), set.targets.end(),
              [](const TargetRecord& a, const TargetRecord& b) {
                return a.target_id < b.target_id;
              });
    for (const PairRecord& p : set.pairs) {
      if (set.FindTarget(p.target_id) == nullptr) {
        throw AuditError("pair '" + p.pair_id + "' references unknown target");
      }
    }
    return set;
  } catch (const json::exception& e) {
    throw AuditError(std::string("malformed auditing set: ") + e.what());
  }
}

void SaveAuditingSet(const AuditingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw AuditError("cannot write " + path.string());
  out << ToJson(set).dump(2) << '\n';
}

AuditingSet LoadAuditingSet(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw AuditError(path.string() + ": " + e.what());
  }
  return AuditingSetFromJson(doc);
}

}  // namespace isaac
