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

#include "isaac/bootstrap.h"

#include <cmath>
#include <limits>

#include "isaac/metrics.h"
#include "isaac/types.h"

namespace isaac {

void BootstrapConfig::Validate() const {
  if (n_replicates < 1) throw AuditError("bootstrap needs at least 1 replicate");
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw AuditError("ci_level must lie in (0, 1)");
  }
}

std::vector<ResponseSet> HierarchicalResample(
    std::span<const ResponseSet> responses, SplitMix64& rng) {
  std::vector<ResponseSet> out;
  out.reserve(responses.size());
  auto resample = [&rng](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (double& x : r) x = v[rng.UniformBelow(v.size())];
    return r;
  };
  for (size_t i = 0; i < responses.size(); ++i) {
    const ResponseSet& src = responses[rng.UniformBelow(responses.size())];
    ResponseSet drawn;
    drawn.pair_id = src.pair_id;
    drawn.mech_deltas = resample(src.mech_deltas);
    drawn.spur_deltas = resample(src.spur_deltas);
    out.push_back(std::move(drawn));
  }
  return out;
}

std::vector<std::vector<double>> BootstrapReplicates(
    std::span<const ResponseSet> responses, const MultiMetricFn& metrics,
    const BootstrapConfig& config) {
  config.Validate();
  if (responses.empty()) throw AuditError("bootstrap: empty response list");
  std::vector<std::vector<double>> out;
  for (size_t r = 0; r < config.n_replicates; ++r) {
    SplitMix64 rng(DeriveSeed({config.seed, r}));
    const std::vector<ResponseSet> sample = HierarchicalResample(responses, rng);
    const std::vector<double> values = metrics(sample);
    if (out.empty()) out.resize(values.size());
    if (values.size() != out.size()) {
      throw AuditError("bootstrap: metric count changed between replicates");
    }
    for (size_t m = 0; m < values.size(); ++m) out[m].push_back(values[m]);
  }
  return out;
}

MetricWithCI PercentileInterval(double point, std::span<const double> replicates,
                                double ci_level) {
  std::vector<double> finite;
  finite.reserve(replicates.size());
  for (double v : replicates) {
    if (!std::isnan(v)) finite.push_back(v);
  }
  if (finite.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {point, nan, nan};
  }
  const double alpha = (1.0 - ci_level) / 2.0;
  return {point, Quantile(finite, alpha), Quantile(finite, 1.0 - alpha)};
}

MetricWithCI HierarchicalBootstrap(std::span<const ResponseSet> responses,
                                   const MetricFn& metric,
                                   const BootstrapConfig& config) {
  const MultiMetricFn wrapped = [&metric](std::span<const ResponseSet> s) {
    return std::vector<double>{metric(s)};
  };
  return HierarchicalBootstrap(responses, wrapped, config).front();
}

std::vector<MetricWithCI> HierarchicalBootstrap(
    std::span<const ResponseSet> responses, const MultiMetricFn& metrics,
    const BootstrapConfig& config) {
  if (responses.empty()) throw AuditError("bootstrap: empty response list");
  const std::vector<double> points = metrics(responses);
  const std::vector<std::vector<double>> reps =
      BootstrapReplicates(responses, metrics, config);
  std::vector<MetricWithCI> out;
  out.reserve(points.size());
  for (size_t m = 0; m < points.size(); ++m) {
    out.push_back(PercentileInterval(points[m], reps[m], config.ci_level));
  }
  return out;
}

std::map<std::string, AggregatedMetric> AggregateRuns(
    std::span<const MetricTable> runs) {
  if (runs.empty()) throw AuditError("aggregate: no runs");
  for (const MetricTable& run : runs) {
    bool same = run.size() == runs.front().size();
    for (auto a = run.begin(), b = runs.front().begin(); same && a != run.end();
         ++a, ++b) {
      same = a->first == b->first;
    }
    if (!same) throw AuditError("aggregate: mismatched metric sets across runs");
  }

  // Means are accumulated as offsets from the first run so that identical
  // runs aggregate to exactly their common value.
  const auto n = static_cast<double>(runs.size());
  auto mean_of = [&](auto field) {
    const double base = field(runs.front());
    double offset = 0.0;
    for (const MetricTable& run : runs) offset += field(run) - base;
    return base + offset / n;
  };
  std::map<std::string, AggregatedMetric> out;
  for (const auto& [name, unused] : runs.front()) {
    AggregatedMetric agg;
    for (const MetricTable& run : runs) agg.per_run.push_back(run.at(name).point);
    agg.mean = mean_of([&](const MetricTable& t) { return t.at(name).point; });
    agg.ci_low = mean_of([&](const MetricTable& t) { return t.at(name).ci_low; });
    agg.ci_high =
        mean_of([&](const MetricTable& t) { return t.at(name).ci_high; });
    if (runs.size() > 1) {
      double ss = 0.0;
      for (double v : agg.per_run) ss += (v - agg.mean) * (v - agg.mean);
      agg.std = std::sqrt(ss / (n - 1.0));
    }
    out.emplace(name, std::move(agg));
  }
  return out;
}

}  // namespace isaac
