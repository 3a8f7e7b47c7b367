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

// Synthetic auditing sets for tests: random sequences with a contiguous
// prior block, annotated with expected residues.

#ifndef ISAAC_TESTS_SYNTHETIC_H_
#define ISAAC_TESTS_SYNTHETIC_H_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "isaac/auditing_set.h"
#include "isaac/random.h"

namespace isaac::testing {

struct SyntheticOptions {
  size_t n_targets = 50;
  size_t min_length = 200;
  size_t max_length = 600;
  size_t min_prior = 40;
  size_t max_prior = 100;
  size_t drugs_per_target = 1;
  uint64_t seed = 7;
};

inline size_t UniformInRange(SplitMix64& rng, size_t lo, size_t hi) {
  return lo + rng.UniformBelow(hi - lo + 1);
}

inline std::vector<TargetRecord> MakeSyntheticTargets(
    const SyntheticOptions& opt) {
  SplitMix64 rng(opt.seed);
  std::vector<TargetRecord> out;
  for (size_t i = 0; i < opt.n_targets; ++i) {
    TargetRecord t;
    char id[32];
    std::snprintf(id, sizeof(id), "T%03zu", i);
    t.target_id = id;
    const size_t m = UniformInRange(rng, opt.min_length, opt.max_length);
    for (size_t p = 0; p < m; ++p) {
      t.sequence.push_back(kCanonicalResidues[rng.UniformBelow(20)]);
    }
    const size_t block = UniformInRange(rng, opt.min_prior, opt.max_prior);
    const size_t start = 1 + rng.UniformBelow(m - block + 1);
    t.prior_residues.emplace();
    for (size_t p = start; p < start + block; ++p) {
      t.prior_scope.push_back(static_cast<ResidueIndex>(p));
      t.prior_residues->emplace(static_cast<ResidueIndex>(p), t.sequence[p - 1]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<PairRecord> MakeSyntheticPairs(
    const std::vector<TargetRecord>& targets, const SyntheticOptions& opt) {
  SplitMix64 rng(opt.seed ^ 0x5A5A5A5AULL);
  std::vector<PairRecord> out;
  size_t n = 0;
  for (const TargetRecord& t : targets) {
    for (size_t d = 0; d < opt.drugs_per_target; ++d) {
      std::string drug = "C";
      const size_t len = UniformInRange(rng, 3, 12);
      for (size_t j = 0; j < len; ++j) drug.push_back("CNO()=c1"[rng.UniformBelow(8)]);
      char id[32];
      std::snprintf(id, sizeof(id), "P%04zu", n++);
      out.push_back({id, drug, t.target_id, static_cast<int>(rng.UniformBelow(2))});
    }
  }
  return out;
}

inline AuditingSet MakeSyntheticSet(const SyntheticOptions& opt = {}) {
  std::vector<TargetRecord> targets = MakeSyntheticTargets(opt);
  std::vector<PairRecord> pairs = MakeSyntheticPairs(targets, opt);
  return Compile(std::move(targets), std::move(pairs), CompileConfig{});
}

inline void WriteTargetsTsv(const std::filesystem::path& path,
                            const std::vector<TargetRecord>& targets) {
  std::ofstream out(path);
  out << "target_id\tsequence\tprior_indices\tprior_residues\n";
  for (const TargetRecord& t : targets) {
    out << t.target_id << '\t' << t.sequence << '\t';
    for (size_t i = 0; i < t.prior_scope.size(); ++i) {
      out << (i ? "," : "") << t.prior_scope[i];
    }
    out << '\t';
    if (t.prior_residues) {
      bool first = true;
      for (const auto& [i, c] : *t.prior_residues) {
        out << (first ? "" : ",") << i << ':' << c;
        first = false;
      }
    }
    out << '\n';
  }
}

inline void WritePairsTsv(const std::filesystem::path& path,
                          const std::vector<PairRecord>& pairs) {
  std::ofstream out(path);
  out << "pair_id\tdrug\ttarget_id\tlabel\n";
  for (const PairRecord& p : pairs) {
    out << p.pair_id << '\t' << p.drug << '\t' << p.target_id << '\t'
        << (p.label ? std::to_string(*p.label) : "") << '\n';
  }
}

}  // namespace isaac::testing

#endif  // ISAAC_TESTS_SYNTHETIC_H_
