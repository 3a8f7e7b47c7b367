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

// Hierarchical percentile bootstrap over audited inputs and their
// interventional responses, and aggregation of metrics across runs.

#ifndef ISAAC_BOOTSTRAP_H_
#define ISAAC_BOOTSTRAP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "isaac/random.h"
#include "isaac/response.h"

namespace isaac {

struct BootstrapConfig {
  size_t n_replicates = 1000;
  double ci_level = 0.95;
  uint64_t seed = 0;

  void Validate() const;
};

struct MetricWithCI {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const MetricWithCI&, const MetricWithCI&) = default;
};

using MetricFn = std::function<double(std::span<const ResponseSet>)>;
using MultiMetricFn =
    std::function<std::vector<double>(std::span<const ResponseSet>)>;

// One two-level resample: inputs with replacement, then mechanistic and
// spurious deltas of each drawn input with replacement at their own sizes.
std::vector<ResponseSet> HierarchicalResample(
    std::span<const ResponseSet> responses, SplitMix64& rng);

// Replicate values, indexed [metric][replicate]. Replicate r draws from
// SplitMix64(DeriveSeed({seed, r})), so results do not depend on
// evaluation order.
std::vector<std::vector<double>> BootstrapReplicates(
    std::span<const ResponseSet> responses, const MultiMetricFn& metrics,
    const BootstrapConfig& config);

// Percentile interval at (1 - level)/2 and 1 - (1 - level)/2. NaN replicate
// values (metric undefined on that resample) are skipped.
MetricWithCI PercentileInterval(double point, std::span<const double> replicates,
                                double ci_level);

MetricWithCI HierarchicalBootstrap(std::span<const ResponseSet> responses,
                                   const MetricFn& metric,
                                   const BootstrapConfig& config);

// Same replicates shared by every metric returned from `metrics`.
std::vector<MetricWithCI> HierarchicalBootstrap(
    std::span<const ResponseSet> responses, const MultiMetricFn& metrics,
    const BootstrapConfig& config);

using MetricTable = std::map<std::string, MetricWithCI>;

struct AggregatedMetric {
  double mean = 0.0;
  double std = 0.0;  // sample std (n - 1), 0 for a single run
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> per_run;
};

// Across-run mean, sample standard deviation and averaged CI endpoints.
// Throws AuditError if `runs` is empty or runs disagree on metric names.
std::map<std::string, AggregatedMetric> AggregateRuns(
    std::span<const MetricTable> runs);

}  // namespace isaac

#endif  // ISAAC_BOOTSTRAP_H_
