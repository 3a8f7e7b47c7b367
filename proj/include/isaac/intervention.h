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

// Matched mechanistic/spurious scope sampling and scope geometry.

#ifndef ISAAC_INTERVENTION_H_
#define ISAAC_INTERVENTION_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "isaac/random.h"
#include "isaac/types.h"

namespace isaac {

struct SamplingPlan {
  double scope_fraction = 0.25;
  uint32_t n_pairs_per_input = 20;
  std::vector<Operator> operators = {Operator::kMask,
                                     Operator::kClassSubstitution};
  uint64_t master_seed = 0;

  // Throws AuditError on an out-of-range field.
  void Validate() const;
  // Operators deduplicated in canonical (enum) order.
  std::vector<Operator> CanonicalOperators() const;
};

// For each operator and each pair index, draws a uniform k-subset of the
// prior and a uniform k-subset of its complement, k = ScopeCardinality().
// The stream for (target, pair index, operator) is seeded with
// DeriveSeed({master_seed, HashString(target_id), pair_index, operator});
// the mechanistic scope is drawn first by partial Fisher-Yates over the
// ascending prior, then the spurious scope over the ascending complement.
// Output is ordered by (operator, pair index). Throws AuditError when the
// complement is smaller than k.
std::vector<MatchedPair> SampleMatchedPairs(const TargetRecord& target,
                                            const SamplingPlan& plan);

// Uniform k-subset of `population`, ascending.
std::vector<ResidueIndex> SampleSubset(std::span<const ResidueIndex> population,
                                       size_t k, SplitMix64& rng);

// max(indices) - min(indices).
size_t ScopeSpread(const Scope& scope);

// Fraction of indices with at least one selected sequence neighbour.
double ScopeContiguity(const Scope& scope);

struct GeometryStats {
  double mean_spread_mech = 0.0;
  double mean_spread_spur = 0.0;
  double mean_contiguity_mech = 0.0;
  double mean_contiguity_spur = 0.0;
};

GeometryStats GeometrySummary(std::span<const MatchedPair> pairs);

// Tab-separated replay dump, one row per InterventionSpec:
// intervention_id, target_id, class_tag, operator, k, indices.
void WriteInterventionDump(std::ostream& out,
                           std::span<const MatchedPair> pairs);

}  // namespace isaac

#endif  // ISAAC_INTERVENTION_H_
