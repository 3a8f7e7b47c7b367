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

#include "isaac/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isaac/types.h"

namespace isaac {
namespace {

void RequireNonEmpty(std::span<const double> values, const char* what) {
  if (values.empty()) {
    throw AuditError(std::string(what) + ": empty input list");
  }
}

// Quantile on an already sorted, non-empty list.
double SortedQuantile(const std::vector<double>& sorted, double q) {
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> Sorted(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double Quantile(std::span<const double> values, double q) {
  RequireNonEmpty(values, "quantile");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw AuditError("quantile: q must lie in [0, 1]");
  }
  return SortedQuantile(Sorted(values), q);
}

double Median(std::span<const double> values) { return Quantile(values, 0.5); }

double InterquartileRange(std::span<const double> values) {
  RequireNonEmpty(values, "IQR");
  const std::vector<double> sorted = Sorted(values);
  return SortedQuantile(sorted, 0.75) - SortedQuantile(sorted, 0.25);
}

ReasoningScoreResult ReasoningScore(std::span<const double> mech_deltas,
                                    std::span<const double> spur_deltas) {
  RequireNonEmpty(mech_deltas, "reasoning score (mechanistic)");
  RequireNonEmpty(spur_deltas, "reasoning score (spurious)");
  ReasoningScoreResult r;
  r.m_mech = Median(mech_deltas);
  r.m_spur = Median(spur_deltas);
  const double a = std::abs(r.m_mech);
  const double b = std::abs(r.m_spur);
  r.rs = (a == 0.0 && b == 0.0) ? 0.5 : a / (a + b);
  return r;
}

double SeparationCoefficient(std::span<const double> all_mech,
                             std::span<const double> all_spur) {
  RequireNonEmpty(all_mech, "separation coefficient (mechanistic)");
  RequireNonEmpty(all_spur, "separation coefficient (spurious)");
  const std::vector<double> mech = Sorted(all_mech);
  const double iqr = SortedQuantile(mech, 0.75) - SortedQuantile(mech, 0.25);
  if (iqr == 0.0) return 0.0;
  return std::abs(SortedQuantile(mech, 0.5) - Median(all_spur)) / iqr;
}

double OverlapRate(std::span<const double> all_mech,
                   std::span<const double> all_spur) {
  RequireNonEmpty(all_mech, "overlap rate (mechanistic)");
  RequireNonEmpty(all_spur, "overlap rate (spurious)");
  const std::vector<double> mech = Sorted(all_mech);
  const double lo = SortedQuantile(mech, 0.25);
  const double hi = SortedQuantile(mech, 0.75);
  const auto inside = std::count_if(all_spur.begin(), all_spur.end(),
                                    [&](double s) { return lo <= s && s <= hi; });
  return static_cast<double>(inside) / static_cast<double>(all_spur.size());
}

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

double InputSignConsistency(std::span<const double> mech_deltas,
                            double m_mech) {
  if (mech_deltas.empty()) return 0.0;
  const int s = Sign(m_mech);
  const auto matches = std::count_if(mech_deltas.begin(), mech_deltas.end(),
                                     [s](double d) { return Sign(d) == s; });
  return static_cast<double>(matches) / static_cast<double>(mech_deltas.size());
}

double SignConsistency(std::span<const MechanisticResponses> per_input) {
  if (per_input.empty()) return 0.0;
  double sum = 0.0;
  for (const MechanisticResponses& x : per_input) {
    sum += InputSignConsistency(x.deltas, x.m_mech);
  }
  return sum / static_cast<double>(per_input.size());
}

std::optional<double> MechSpurRatio(double m_mech, double m_spur) {
  const double a = std::abs(m_mech);
  const double b = std::abs(m_spur);
  if (b == 0.0) {
    if (a == 0.0) return 1.0;
    return std::nullopt;
  }
  return a / b;
}

DirectionalSummary MsrAndDominance(
    std::span<const std::pair<double, double>> per_input) {
  DirectionalSummary out;
  if (per_input.empty()) {
    out.msr_mean = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ratio_sum = 0.0;
  size_t included = 0;
  size_t dominant = 0;
  for (const auto& [m_mech, m_spur] : per_input) {
    if (auto ratio = MechSpurRatio(m_mech, m_spur)) {
      ratio_sum += *ratio;
      ++included;
    } else {
      ++out.msr_excluded;
    }
    if (std::abs(m_mech) > std::abs(m_spur)) ++dominant;
  }
  out.msr_mean = included == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : ratio_sum / static_cast<double>(included);
  out.md = static_cast<double>(dominant) / static_cast<double>(per_input.size());
  return out;
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw AuditError("AUROC: scores and labels differ in length");
  }
  size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw AuditError("AUROC: labels must be 0 or 1");
    n_pos += static_cast<size_t>(y);
  }
  const size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw AuditError("AUROC undefined: labels contain a single class");
  }

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based midranks of the positives.
  double pos_rank_sum = 0.0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) pos_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double p = static_cast<double>(n_pos);
  const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

PerInputMetrics ComputeInputMetrics(const ResponseSet& responses) {
  const ReasoningScoreResult r =
      ReasoningScore(responses.mech_deltas, responses.spur_deltas);
  PerInputMetrics m;
  m.pair_id = responses.pair_id;
  m.m_mech = r.m_mech;
  m.m_spur = r.m_spur;
  m.rs = r.rs;
  m.sc = InputSignConsistency(responses.mech_deltas, r.m_mech);
  m.msr = MechSpurRatio(r.m_mech, r.m_spur);
  m.md = std::abs(r.m_mech) > std::abs(r.m_spur);
  return m;
}

ModelMetrics ComputeModelMetrics(std::span<const ResponseSet> responses) {
  if (responses.empty()) {
    throw AuditError("model metrics: no audited inputs");
  }
  std::vector<double> pooled_mech;
  std::vector<double> pooled_spur;
  std::vector<MechanisticResponses> mech_inputs;
  std::vector<std::pair<double, double>> centrals;
  mech_inputs.reserve(responses.size());
  centrals.reserve(responses.size());
  double rs_sum = 0.0;
  for (const ResponseSet& x : responses) {
    const ReasoningScoreResult r = ReasoningScore(x.mech_deltas, x.spur_deltas);
    rs_sum += r.rs;
    pooled_mech.insert(pooled_mech.end(), x.mech_deltas.begin(),
                       x.mech_deltas.end());
    pooled_spur.insert(pooled_spur.end(), x.spur_deltas.begin(),
                       x.spur_deltas.end());
    mech_inputs.push_back({x.mech_deltas, r.m_mech});
    centrals.emplace_back(r.m_mech, r.m_spur);
  }

  ModelMetrics out;
  out.rs_mean = rs_sum / static_cast<double>(responses.size());
  out.c_sep = SeparationCoefficient(pooled_mech, pooled_spur);
  out.overlap = OverlapRate(pooled_mech, pooled_spur);
  out.sc = SignConsistency(mech_inputs);
  const DirectionalSummary d = MsrAndDominance(centrals);
  out.msr_mean = d.msr_mean;
  out.msr_excluded = d.msr_excluded;
  out.md = d.md;
  return out;
}

}  // namespace isaac
