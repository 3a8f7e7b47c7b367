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

#include "isaac/types.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "isaac/random.h"

namespace isaac {
namespace {

constexpr std::array<std::string_view, 6> kClasses = {
    "AVLIMFW", "Y", "STNQC", "GP", "KRH", "DE"};

}  // namespace

bool IsCanonicalResidue(char c) {
  return kCanonicalResidues.find(c) != std::string_view::npos;
}

std::string_view PhysicochemicalClass(char residue) {
  for (std::string_view cls : kClasses) {
    if (cls.find(residue) != std::string_view::npos) return cls;
  }
  return {};
}

bool TargetRecord::InPrior(ResidueIndex i) const {
  return std::binary_search(prior_scope.begin(), prior_scope.end(), i);
}

std::vector<ResidueIndex> TargetRecord::Complement() const {
  std::vector<ResidueIndex> out;
  const auto m = static_cast<ResidueIndex>(sequence.size());
  out.reserve(m > prior_scope.size() ? m - prior_scope.size() : 0);
  auto it = prior_scope.begin();
  for (ResidueIndex i = 1; i <= m; ++i) {
    while (it != prior_scope.end() && *it < i) ++it;
    if (it == prior_scope.end() || *it != i) out.push_back(i);
  }
  return out;
}

std::string_view ToString(ScopeClass c) {
  return c == ScopeClass::kMechanistic ? "mechanistic" : "spurious";
}

std::string_view ToString(Operator op) {
  return op == Operator::kMask ? "mask" : "substitution";
}

Operator ParseOperator(std::string_view name) {
  if (name == "mask") return Operator::kMask;
  if (name == "substitution" || name == "sub" ||
      name == "class_substitution") {
    return Operator::kClassSubstitution;
  }
  throw AuditError("unknown operator '" + std::string(name) + "'");
}

std::string MakeInterventionId(std::string_view target_id, const Scope& scope,
                               Operator op, uint64_t rng_seed,
                               uint32_t replicate) {
  uint64_t h = DeriveSeed({HashString(target_id), static_cast<uint64_t>(op),
                           static_cast<uint64_t>(scope.class_tag), rng_seed,
                           replicate});
  for (ResidueIndex i : scope.indices) h = Mix64(h ^ i) + kGoldenGamma;
  char digest[17];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(h));
  std::ostringstream id;
  id << target_id << '|' << (op == Operator::kMask ? "mask" : "sub") << '|'
     << (scope.class_tag == ScopeClass::kMechanistic ? "mech" : "spur")
     << "|r" << replicate << '|' << digest;
  return id.str();
}

std::string ValidationResult::Summary() const {
  std::string out;
  for (const Violation& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationResult ValidateTarget(const TargetRecord& record) {
  ValidationResult result;
  auto add = [&](std::string invariant, std::optional<ResidueIndex> index,
                 std::string message) {
    result.violations.push_back(
        {std::move(invariant), index, std::move(message)});
  };

  if (record.target_id.empty()) add("target_id", std::nullopt, "empty target_id");
  if (record.sequence.empty()) add("sequence", std::nullopt, "empty sequence");
  for (size_t p = 0; p < record.sequence.size(); ++p) {
    const char c = record.sequence[p];
    if (!IsCanonicalResidue(c)) {
      add("sequence", static_cast<ResidueIndex>(p + 1),
          "non-canonical letter " + std::string(1, c) + " at " +
              std::to_string(p + 1));
    }
  }

  const size_t m = record.sequence.size();
  for (size_t j = 0; j < record.prior_scope.size(); ++j) {
    const ResidueIndex i = record.prior_scope[j];
    if (i < 1 || i > m) {
      add("prior_scope", i,
          "index out of range: " + std::to_string(i) + " not in [1, " +
              std::to_string(m) + "]");
    }
    if (j > 0) {
      const ResidueIndex prev = record.prior_scope[j - 1];
      if (prev == i) {
        add("prior_scope", i, "duplicate index " + std::to_string(i));
      } else if (prev > i) {
        add("prior_scope", i, "unsorted index " + std::to_string(i));
      }
    }
  }

  if (record.prior_residues) {
    const std::set<ResidueIndex> prior(record.prior_scope.begin(),
                                       record.prior_scope.end());
    for (const auto& [i, letter] : *record.prior_residues) {
      if (!prior.contains(i)) {
        add("prior_residues", i,
            "expected residue given for non-prior index " + std::to_string(i));
      }
    }
    for (ResidueIndex i : prior) {
      if (!record.prior_residues->contains(i)) {
        add("prior_residues", i,
            "missing expected residue for prior index " + std::to_string(i));
      }
    }
  }
  return result;
}

char SubstituteResidue(char residue, uint64_t rng_seed,
                       std::string_view target_id, ResidueIndex position) {
  const std::string_view cls = PhysicochemicalClass(residue);
  std::string candidates;
  for (char c : cls) {
    if (c != residue) candidates.push_back(c);
  }
  if (candidates.empty()) return kMaskToken;
  SplitMix64 rng(DeriveSeed({rng_seed, HashString(target_id), position}));
  return candidates[rng.UniformBelow(candidates.size())];
}

std::string ApplyIntervention(std::string_view sequence,
                              const InterventionSpec& spec) {
  std::string out(sequence);
  for (ResidueIndex i : spec.scope.indices) {
    if (i < 1 || i > out.size()) {
      throw AuditError("intervention " + spec.intervention_id +
                       ": scope index " + std::to_string(i) +
                       " outside [1, " + std::to_string(out.size()) + "]");
    }
    char& slot = out[i - 1];
    slot = spec.op == Operator::kMask
               ? kMaskToken
               : SubstituteResidue(slot, spec.rng_seed, spec.target_id, i);
  }
  return out;
}

size_t ScopeCardinality(size_t prior_size, double scope_fraction) {
  const double k = std::round(scope_fraction * static_cast<double>(prior_size));
  return std::max<size_t>(1, static_cast<size_t>(k));
}

}  // namespace isaac
