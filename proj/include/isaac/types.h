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

// Structured-input data model shared by every audit stage: protein targets
// with their prior-annotated residue scope, drug-target pairs, intervention
// scopes and the deterministic intervention operators acting on them.
//
// Residue indices are 1-based throughout.

#ifndef ISAAC_TYPES_H_
#define ISAAC_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isaac {

// Raised for contract violations that must abort an audit.
class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ResidueIndex = uint32_t;

inline constexpr std::string_view kCanonicalResidues = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr char kMaskToken = 'X';

bool IsCanonicalResidue(char c);

// Members of the physicochemical class containing `residue`, in a fixed
// order: hydrophobic AVLIMFW, aromatic-polar Y, polar STNQC, special GP,
// positive KRH, negative DE. Empty for non-canonical letters.
std::string_view PhysicochemicalClass(char residue);

struct TargetRecord {
  std::string target_id;
  std::string sequence;
  std::vector<ResidueIndex> prior_scope;  // sorted, unique
  // Expected residue letter per prior index, when the annotation carries one.
  std::optional<std::map<ResidueIndex, char>> prior_residues;

  size_t length() const { return sequence.size(); }
  bool InPrior(ResidueIndex i) const;
  // {1..M} \ prior_scope, ascending.
  std::vector<ResidueIndex> Complement() const;

  friend bool operator==(const TargetRecord&, const TargetRecord&) = default;
};

struct PairRecord {
  std::string pair_id;
  std::string drug;  // SMILES, opaque
  std::string target_id;
  std::optional<int> label;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

enum class ScopeClass { kMechanistic, kSpurious };
enum class Operator { kMask, kClassSubstitution };

std::string_view ToString(ScopeClass c);
std::string_view ToString(Operator op);
// Accepts "mask" and "substitution" (alias "sub", "class_substitution").
Operator ParseOperator(std::string_view name);

struct Scope {
  std::vector<ResidueIndex> indices;  // sorted, unique, non-empty
  ScopeClass class_tag = ScopeClass::kMechanistic;

  size_t size() const { return indices.size(); }
  friend bool operator==(const Scope&, const Scope&) = default;
};

struct InterventionSpec {
  std::string target_id;
  Scope scope;
  Operator op = Operator::kMask;
  uint64_t rng_seed = 0;
  uint32_t replicate = 0;  // matched-pair index within (target, operator)
  std::string intervention_id;

  friend bool operator==(const InterventionSpec&,
                         const InterventionSpec&) = default;
};

// Stable identifier; unique within a run because the replicate index and the
// class tag are part of it.
std::string MakeInterventionId(std::string_view target_id, const Scope& scope,
                               Operator op, uint64_t rng_seed,
                               uint32_t replicate);

struct MatchedPair {
  InterventionSpec mech;
  InterventionSpec spur;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Violation {
  std::string invariant;
  std::optional<ResidueIndex> index;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string Summary() const;
};

ValidationResult ValidateTarget(const TargetRecord& record);

// Residue placed at `position` by the class-substitution operator. Drawn
// uniformly from the residue's class minus the residue itself; singleton
// classes fall back to the mask token.
char SubstituteResidue(char residue, uint64_t rng_seed,
                       std::string_view target_id, ResidueIndex position);

// Returns the intervened sequence. Positions outside the scope are copied
// verbatim. Throws AuditError if a scope index is outside [1, |sequence|].
std::string ApplyIntervention(std::string_view sequence,
                              const InterventionSpec& spec);

// Scope size k = max(1, round(fraction * prior_size)), rounding half away
// from zero.
size_t ScopeCardinality(size_t prior_size, double scope_fraction);

}  // namespace isaac

#endif  // ISAAC_TYPES_H_
