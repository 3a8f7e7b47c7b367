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

// Black-box scoring: the endpoint abstraction, in-process oracles, score
// caching and the assembly of interventional response differences.

#ifndef ISAAC_SCORING_H_
#define ISAAC_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "isaac/response.h"
#include "isaac/types.h"

namespace isaac {

// Transport-level failure (dead process, timeout, broken pipe). ScoreBatch
// retries these; every other AuditError is fatal.
class TransportError : public AuditError {
 public:
  using AuditError::AuditError;
};

enum class EndpointKind { kInProcessOracle, kExternalProcess };

struct ScoreRequest {
  std::string id;
  std::string drug;
  std::string target;     // amino-acid sequence, possibly intervened
  std::string target_id;  // in-process metadata; never sent on the wire
};

struct ScoreResult {
  std::string id;
  double score = 0.0;
};

class ScoringEndpoint {
 public:
  virtual ~ScoringEndpoint() = default;

  virtual EndpointKind kind() const = 0;
  virtual const std::string& identity() const = 0;
  virtual size_t batch_size() const = 0;

  // Scores at most batch_size() requests. Results may arrive in any order.
  virtual std::vector<ScoreResult> ScoreBatch(
      std::span<const ScoreRequest> batch) = 0;

  // Invoked before retrying a batch that failed with a TransportError.
  virtual void Reset() {}
};

struct ScoringOptions {
  size_t max_retries = 3;
};

// Splits `items` into endpoint-sized batches and returns one result per item
// in request order. Missing, duplicated or unknown ids and non-finite scores
// throw AuditError naming the id.
std::vector<ScoreResult> ScoreBatch(ScoringEndpoint& endpoint,
                                    std::span<const ScoreRequest> items,
                                    const ScoringOptions& options = {});

enum class OracleKind {
  kPriorSensitive,
  kComplementSensitive,
  kCompositionShortcut,
  kConstant,
  kEchoLength,
};

// Accepts prior_sensitive, complement_sensitive, composition_shortcut,
// constant and echo_length.
OracleKind ParseOracleKind(std::string_view name);
std::string_view ToString(OracleKind kind);

// target_id -> ascending prior indices.
using PriorLookup = std::map<std::string, std::vector<ResidueIndex>, std::less<>>;

// Synthetic scorers with known structure.
//   prior_sensitive:       drug offset + sum of seeded residue weights over
//                          prior positions only
//   complement_sensitive:  the same over non-prior positions only
//   composition_shortcut:  drug offset + seeded weights of global residue
//                          counts (position-blind)
//   constant:              0
//   echo_length:           sequence length
// Weights are multiples of 1/256 in [-2, 2], so sums and positive-affine
// rescalings by small integers are exact in double precision.
// The prior-aware oracles need `priors` and throw on unknown target ids.
std::unique_ptr<ScoringEndpoint> MakeOracle(
    OracleKind kind, uint64_t seed,
    std::shared_ptr<const PriorLookup> priors = nullptr,
    std::string identity = {});

// Wraps an endpoint with score -> scale * score + offset.
std::unique_ptr<ScoringEndpoint> MakeAffine(
    std::unique_ptr<ScoringEndpoint> inner, double scale, double offset);

// Memoizes one endpoint's scores by (drug, sequence, target_id) and sends
// only unseen inputs to it.
class CachingScorer {
 public:
  explicit CachingScorer(ScoringEndpoint& endpoint, ScoringOptions options = {})
      : endpoint_(endpoint), options_(options) {}

  // Returns one score per request, in request order.
  std::vector<double> Score(std::span<const ScoreRequest> requests);

  size_t requests_seen() const { return requests_seen_; }
  size_t endpoint_calls() const { return endpoint_calls_; }

 private:
  using Key = std::tuple<std::string, std::string, std::string>;

  ScoringEndpoint& endpoint_;
  ScoringOptions options_;
  std::map<Key, double> cache_;
  size_t requests_seen_ = 0;
  size_t endpoint_calls_ = 0;
};

struct ScoredIntervention {
  std::string pair_id;
  std::string intervention_id;
  ScopeClass class_tag = ScopeClass::kMechanistic;
  Operator op = Operator::kMask;
  double score = 0.0;
};

// delta = intervened score - reference score, partitioned by class tag in
// input order. Throws on mixed pair ids, an empty list or unequal class
// counts.
ResponseSet ResponseDifferences(double reference_score,
                                std::span<const ScoredIntervention> scored);

}  // namespace isaac

#endif  // ISAAC_SCORING_H_
