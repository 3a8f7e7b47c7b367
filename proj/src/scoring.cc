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

#include "isaac/scoring.h"

#include <cmath>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "isaac/random.h"

namespace isaac {
namespace {

// Multiple of 1/256 in [-2, 2].
double DyadicWeight(uint64_t h) {
  return (static_cast<double>(h % 1025) - 512.0) / 256.0;
}

class Oracle final : public ScoringEndpoint {
 public:
  Oracle(OracleKind kind, uint64_t seed,
         std::shared_ptr<const PriorLookup> priors, std::string identity)
      : kind_(kind),
        seed_(seed),
        priors_(std::move(priors)),
        identity_(identity.empty() ? "oracle:" + std::string(ToString(kind))
                                   : std::move(identity)) {
    if ((kind == OracleKind::kPriorSensitive ||
         kind == OracleKind::kComplementSensitive) &&
        priors_ == nullptr) {
      throw AuditError("oracle " + std::string(ToString(kind)) +
                       " requires prior annotations");
    }
  }

  EndpointKind kind() const override { return EndpointKind::kInProcessOracle; }
  const std::string& identity() const override { return identity_; }
  size_t batch_size() const override { return 256; }

  std::vector<ScoreResult> ScoreBatch(
      std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResult> out;
    out.reserve(batch.size());
    for (const ScoreRequest& r : batch) out.push_back({r.id, Score(r)});
    return out;
  }

 private:
  double ResidueWeight(ResidueIndex position, char residue) const {
    return DyadicWeight(DeriveSeed(
        {seed_, position, static_cast<unsigned char>(residue)}));
  }

  double DrugOffset(std::string_view drug) const {
    return 4.0 * DyadicWeight(DeriveSeed({seed_, HashString(drug)}));
  }

  double Score(const ScoreRequest& r) const {
    switch (kind_) {
      case OracleKind::kConstant:
        return 0.0;
      case OracleKind::kEchoLength:
        return static_cast<double>(r.target.size());
      case OracleKind::kCompositionShortcut: {
        std::unordered_map<char, size_t> counts;
        for (char c : r.target) ++counts[c];
        double s = DrugOffset(r.drug);
        for (char c : kCanonicalResidues) {
          s += static_cast<double>(counts[c]) * ResidueWeight(0, c);
        }
        s += static_cast<double>(counts[kMaskToken]) * ResidueWeight(0, kMaskToken);
        return s;
      }
      case OracleKind::kPriorSensitive:
      case OracleKind::kComplementSensitive: {
        auto it = priors_->find(r.target_id);
        if (it == priors_->end()) {
          throw AuditError("oracle " + identity_ + ": no prior for target '" +
                           r.target_id + "' (request " + r.id + ")");
        }
        const std::vector<ResidueIndex>& prior = it->second;
        double s = DrugOffset(r.drug);
        if (kind_ == OracleKind::kPriorSensitive) {
          for (ResidueIndex p : prior) {
            if (p >= 1 && p <= r.target.size()) {
              s += ResidueWeight(p, r.target[p - 1]);
            }
          }
        } else {
          size_t j = 0;
          for (ResidueIndex p = 1; p <= r.target.size(); ++p) {
            while (j < prior.size() && prior[j] < p) ++j;
            if (j < prior.size() && prior[j] == p) continue;
            s += ResidueWeight(p, r.target[p - 1]);
          }
        }
        return s;
      }
    }
    return 0.0;
  }

  OracleKind kind_;
  uint64_t seed_;
  std::shared_ptr<const PriorLookup> priors_;
  std::string identity_;
};

class AffineEndpoint final : public ScoringEndpoint {
 public:
  AffineEndpoint(std::unique_ptr<ScoringEndpoint> inner, double scale,
                 double offset)
      : inner_(std::move(inner)), scale_(scale), offset_(offset) {
    std::ostringstream id;
    id.precision(17);
    id << inner_->identity() << "*" << scale_ << "+" << offset_;
    identity_ = id.str();
  }

  EndpointKind kind() const override { return inner_->kind(); }
  const std::string& identity() const override { return identity_; }
  size_t batch_size() const override { return inner_->batch_size(); }
  void Reset() override { inner_->Reset(); }

  std::vector<ScoreResult> ScoreBatch(
      std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResult> out = inner_->ScoreBatch(batch);
    for (ScoreResult& r : out) r.score = scale_ * r.score + offset_;
    return out;
  }

 private:
  std::unique_ptr<ScoringEndpoint> inner_;
  double scale_;
  double offset_;
  std::string identity_;
};

std::vector<ScoreResult> ScoreOneBatch(ScoringEndpoint& endpoint,
                                       std::span<const ScoreRequest> batch,
                                       const ScoringOptions& options) {
  for (size_t attempt = 0;; ++attempt) {
    try {
      return endpoint.ScoreBatch(batch);
    } catch (const TransportError& e) {
      if (attempt >= options.max_retries) {
        throw AuditError("endpoint " + endpoint.identity() + ": " + e.what() +
                         " (after " + std::to_string(attempt) + " retries)");
      }
      endpoint.Reset();
    }
  }
}

}  // namespace

std::vector<ScoreResult> ScoreBatch(ScoringEndpoint& endpoint,
                                    std::span<const ScoreRequest> items,
                                    const ScoringOptions& options) {
  std::unordered_map<std::string_view, size_t> position;
  position.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    if (!position.emplace(items[i].id, i).second) {
      throw AuditError("duplicate request id '" + items[i].id + "'");
    }
  }

  std::vector<ScoreResult> out(items.size());
  std::vector<bool> filled(items.size(), false);
  const size_t step = std::max<size_t>(1, endpoint.batch_size());
  for (size_t start = 0; start < items.size(); start += step) {
    const auto batch = items.subspan(start, std::min(step, items.size() - start));
    for (ScoreResult& r : ScoreOneBatch(endpoint, batch, options)) {
      auto it = position.find(r.id);
      if (it == position.end() || it->second < start ||
          it->second >= start + batch.size()) {
        throw AuditError("endpoint " + endpoint.identity() +
                         " returned unexpected id '" + r.id + "'");
      }
      if (filled[it->second]) {
        throw AuditError("endpoint " + endpoint.identity() +
                         " returned duplicate score for id '" + r.id + "'");
      }
      if (!std::isfinite(r.score)) {
        throw AuditError("endpoint " + endpoint.identity() +
                         " returned non-finite score for id '" + r.id + "'");
      }
      filled[it->second] = true;
      out[it->second] = std::move(r);
    }
    for (size_t i = start; i < start + batch.size(); ++i) {
      if (!filled[i]) {
        throw AuditError("endpoint " + endpoint.identity() +
                         " returned no score for id '" + items[i].id + "'");
      }
    }
  }
  return out;
}

OracleKind ParseOracleKind(std::string_view name) {
  if (name == "prior_sensitive") return OracleKind::kPriorSensitive;
  if (name == "complement_sensitive") return OracleKind::kComplementSensitive;
  if (name == "composition_shortcut") return OracleKind::kCompositionShortcut;
  if (name == "constant") return OracleKind::kConstant;
  if (name == "echo_length") return OracleKind::kEchoLength;
  throw AuditError("unknown oracle '" + std::string(name) + "'");
}

std::string_view ToString(OracleKind kind) {
  switch (kind) {
    case OracleKind::kPriorSensitive:
      return "prior_sensitive";
    case OracleKind::kComplementSensitive:
      return "complement_sensitive";
    case OracleKind::kCompositionShortcut:
      return "composition_shortcut";
    case OracleKind::kConstant:
      return "constant";
    case OracleKind::kEchoLength:
      return "echo_length";
  }
  return "unknown";
}

std::unique_ptr<ScoringEndpoint> MakeOracle(
    OracleKind kind, uint64_t seed, std::shared_ptr<const PriorLookup> priors,
    std::string identity) {
  return std::make_unique<Oracle>(kind, seed, std::move(priors),
                                  std::move(identity));
}

std::unique_ptr<ScoringEndpoint> MakeAffine(
    std::unique_ptr<ScoringEndpoint> inner, double scale, double offset) {
  if (!(scale > 0.0)) throw AuditError("affine scale must be positive");
  return std::make_unique<AffineEndpoint>(std::move(inner), scale, offset);
}

std::vector<double> CachingScorer::Score(std::span<const ScoreRequest> requests) {
  requests_seen_ += requests.size();
  std::vector<ScoreRequest> pending;
  std::map<Key, size_t> pending_index;
  std::vector<const double*> slots(requests.size(), nullptr);
  std::vector<std::optional<size_t>> pending_slot(requests.size());

  for (size_t i = 0; i < requests.size(); ++i) {
    const ScoreRequest& r = requests[i];
    Key key{r.drug, r.target, r.target_id};
    if (auto it = cache_.find(key); it != cache_.end()) {
      slots[i] = &it->second;
      continue;
    }
    auto [it, inserted] = pending_index.emplace(key, pending.size());
    if (inserted) {
      pending.push_back(
          {"q" + std::to_string(pending.size()), r.drug, r.target, r.target_id});
    }
    pending_slot[i] = it->second;
  }

  std::vector<ScoreResult> fresh;
  if (!pending.empty()) {
    endpoint_calls_ += pending.size();
    fresh = ScoreBatch(endpoint_, pending, options_);
    for (size_t j = 0; j < pending.size(); ++j) {
      cache_.emplace(Key{pending[j].drug, pending[j].target, pending[j].target_id},
                     fresh[j].score);
    }
  }

  std::vector<double> out(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    out[i] = slots[i] ? *slots[i] : fresh[*pending_slot[i]].score;
  }
  return out;
}

ResponseSet ResponseDifferences(double reference_score,
                                std::span<const ScoredIntervention> scored) {
  if (scored.empty()) throw AuditError("response differences: nothing scored");
  ResponseSet out;
  out.pair_id = scored.front().pair_id;
  for (const ScoredIntervention& s : scored) {
    if (s.pair_id != out.pair_id) {
      throw AuditError("response differences: mixed pair ids '" + out.pair_id +
                       "' and '" + s.pair_id + "'");
    }
    const double delta = s.score - reference_score;
    (s.class_tag == ScopeClass::kMechanistic ? out.mech_deltas
                                             : out.spur_deltas)
        .push_back(delta);
  }
  if (out.mech_deltas.size() != out.spur_deltas.size()) {
    throw AuditError("response differences for '" + out.pair_id +
                     "': class imbalance (" +
                     std::to_string(out.mech_deltas.size()) + " mechanistic vs " +
                     std::to_string(out.spur_deltas.size()) + " spurious)");
  }
  return out;
}

}  // namespace isaac
