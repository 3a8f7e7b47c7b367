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

#include "isaac/intervention.h"

#include <algorithm>
#include <string>

#include "isaac/random.h"

namespace isaac {
namespace {

InterventionSpec MakeSpec(const TargetRecord& target, Operator op,
                          ScopeClass cls, std::vector<ResidueIndex> indices,
                          uint64_t seed, uint32_t replicate) {
  InterventionSpec spec;
  spec.target_id = target.target_id;
  spec.scope = Scope{std::move(indices), cls};
  spec.op = op;
  spec.rng_seed = seed;
  spec.replicate = replicate;
  spec.intervention_id =
      MakeInterventionId(spec.target_id, spec.scope, op, seed, replicate);
  return spec;
}

}  // namespace

void SamplingPlan::Validate() const {
  if (!(scope_fraction > 0.0 && scope_fraction <= 1.0)) {
    throw AuditError("scope_fraction must lie in (0, 1]");
  }
  if (n_pairs_per_input < 1) {
    throw AuditError("n_pairs_per_input must be at least 1");
  }
  if (operators.empty()) throw AuditError("no intervention operators");
}

std::vector<Operator> SamplingPlan::CanonicalOperators() const {
  std::vector<Operator> ops = operators;
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return ops;
}

std::vector<ResidueIndex> SampleSubset(std::span<const ResidueIndex> population,
                                       size_t k, SplitMix64& rng) {
  if (k > population.size()) {
    throw AuditError("cannot sample " + std::to_string(k) + " of " +
                     std::to_string(population.size()) + " residues");
  }
  std::vector<ResidueIndex> pool(population.begin(), population.end());
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + rng.UniformBelow(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<MatchedPair> SampleMatchedPairs(const TargetRecord& target,
                                            const SamplingPlan& plan) {
  plan.Validate();
  if (target.prior_scope.empty()) {
    throw AuditError("target '" + target.target_id + "' has an empty prior");
  }
  const size_t k = ScopeCardinality(target.prior_scope.size(),
                                    plan.scope_fraction);
  const std::vector<ResidueIndex> complement = target.Complement();
  if (complement.size() < k || target.prior_scope.size() < k) {
    throw AuditError("target '" + target.target_id + "': complement of size " +
                     std::to_string(complement.size()) +
                     " cannot match scope cardinality " + std::to_string(k));
  }

  const uint64_t target_hash = HashString(target.target_id);
  std::vector<MatchedPair> out;
  for (Operator op : plan.CanonicalOperators()) {
    for (uint32_t r = 0; r < plan.n_pairs_per_input; ++r) {
      SplitMix64 rng(DeriveSeed(
          {plan.master_seed, target_hash, r, static_cast<uint64_t>(op)}));
      std::vector<ResidueIndex> mech = SampleSubset(target.prior_scope, k, rng);
      std::vector<ResidueIndex> spur = SampleSubset(complement, k, rng);
      out.push_back({MakeSpec(target, op, ScopeClass::kMechanistic,
                              std::move(mech), plan.master_seed, r),
                     MakeSpec(target, op, ScopeClass::kSpurious,
                              std::move(spur), plan.master_seed, r)});
    }
  }
  return out;
}

size_t ScopeSpread(const Scope& scope) {
  if (scope.indices.empty()) return 0;
  const auto [lo, hi] =
      std::minmax_element(scope.indices.begin(), scope.indices.end());
  return *hi - *lo;
}

double ScopeContiguity(const Scope& scope) {
  if (scope.indices.empty()) return 0.0;
  std::vector<ResidueIndex> s = scope.indices;
  std::sort(s.begin(), s.end());
  size_t adjacent = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const bool left = i > 0 && s[i - 1] + 1 == s[i];
    const bool right = i + 1 < s.size() && s[i] + 1 == s[i + 1];
    if (left || right) ++adjacent;
  }
  return static_cast<double>(adjacent) / static_cast<double>(s.size());
}

GeometryStats GeometrySummary(std::span<const MatchedPair> pairs) {
  GeometryStats g;
  if (pairs.empty()) return g;
  for (const MatchedPair& p : pairs) {
    g.mean_spread_mech += static_cast<double>(ScopeSpread(p.mech.scope));
    g.mean_spread_spur += static_cast<double>(ScopeSpread(p.spur.scope));
    g.mean_contiguity_mech += ScopeContiguity(p.mech.scope);
    g.mean_contiguity_spur += ScopeContiguity(p.spur.scope);
  }
  const auto n = static_cast<double>(pairs.size());
  g.mean_spread_mech /= n;
  g.mean_spread_spur /= n;
  g.mean_contiguity_mech /= n;
  g.mean_contiguity_spur /= n;
  return g;
}

void WriteInterventionDump(std::ostream& out,
                           std::span<const MatchedPair> pairs) {
  out << "intervention_id\ttarget_id\tclass_tag\toperator\tk\tindices\n";
  auto row = [&](const InterventionSpec& s) {
    out << s.intervention_id << '\t' << s.target_id << '\t'
        << ToString(s.scope.class_tag) << '\t' << ToString(s.op) << '\t'
        << s.scope.size() << '\t';
    for (size_t i = 0; i < s.scope.indices.size(); ++i) {
      out << (i ? "," : "") << s.scope.indices[i];
    }
    out << '\n';
  };
  for (const MatchedPair& p : pairs) {
    row(p.mech);
    row(p.spur);
  }
}

}  // namespace isaac
