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

// Interventional audit metrics.
//
// Quantiles use linear interpolation between order statistics at zero-based
// rank q * (n - 1). Every median, IQR and percentile in the toolkit goes
// through Quantile().

#ifndef ISAAC_METRICS_H_
#define ISAAC_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isaac/response.h"

namespace isaac {

// Throws AuditError on an empty list or q outside [0, 1].
double Quantile(std::span<const double> values, double q);
double Median(std::span<const double> values);
double InterquartileRange(std::span<const double> values);

struct ReasoningScoreResult {
  double m_mech = 0.0;
  double m_spur = 0.0;
  double rs = 0.5;
};

// RS(x) = |m_mech| / (|m_mech| + |m_spur|), 0.5 when both medians vanish.
ReasoningScoreResult ReasoningScore(std::span<const double> mech_deltas,
                                    std::span<const double> spur_deltas);

// |median(mech) - median(spur)| / IQR(mech) over pooled responses; 0 when the
// mechanistic IQR is 0.
double SeparationCoefficient(std::span<const double> all_mech,
                             std::span<const double> all_spur);

// Fraction of spurious responses inside the closed band [Q25, Q75] of the
// mechanistic responses.
double OverlapRate(std::span<const double> all_mech,
                   std::span<const double> all_spur);

// sign(0) = 0, so a zero delta matches only a zero central response.
int Sign(double v);

// Fraction of `mech_deltas` whose sign equals sign(m_mech).
double InputSignConsistency(std::span<const double> mech_deltas, double m_mech);

struct MechanisticResponses {
  std::span<const double> deltas;
  double m_mech = 0.0;
};

// Per-input match fraction averaged over inputs. 0 for an empty list.
double SignConsistency(std::span<const MechanisticResponses> per_input);

// Per-input |m_mech| / |m_spur|; 1 when both are zero; nullopt (excluded)
// when only m_spur is zero.
std::optional<double> MechSpurRatio(double m_mech, double m_spur);

struct DirectionalSummary {
  double msr_mean = 0.0;  // NaN when every input is excluded
  size_t msr_excluded = 0;
  double md = 0.0;
};

// Input pairs are (m_mech, m_spur).
DirectionalSummary MsrAndDominance(
    std::span<const std::pair<double, double>> per_input);

// Mann-Whitney AUROC with ties counted as 1/2. Throws AuditError unless both
// labels occur.
double Auroc(std::span<const double> scores, std::span<const int> labels);

struct PerInputMetrics {
  std::string pair_id;
  double m_mech = 0.0;
  double m_spur = 0.0;
  double rs = 0.5;
  double sc = 0.0;
  std::optional<double> msr;
  bool md = false;
};

struct ModelMetrics {
  double rs_mean = 0.5;
  double c_sep = 0.0;
  double overlap = 0.0;
  double sc = 0.0;
  double msr_mean = 0.0;
  size_t msr_excluded = 0;
  double md = 0.0;
  std::optional<double> auroc;
};

PerInputMetrics ComputeInputMetrics(const ResponseSet& responses);

// All model-level metrics except AUROC. Throws AuditError on an empty set.
ModelMetrics ComputeModelMetrics(std::span<const ResponseSet> responses);

}  // namespace isaac

#endif  // ISAAC_METRICS_H_
