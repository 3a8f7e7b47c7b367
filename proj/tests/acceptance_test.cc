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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs on in-process oracles only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "isaac/audit.h"
#include "isaac/bootstrap.h"
#include "isaac/intervention.h"
#include "isaac/metrics.h"
#include "isaac/random.h"
#include "oracles.h"
#include "synthetic.h"

namespace isaac {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void Report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.Fail(std::string("exception: ") + e.what());
  }
  std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string Fmt(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

const AuditingSet& SyntheticSet() {
  static const AuditingSet set = testing::MakeSyntheticSet({});
  return set;
}

RunConfig AuditConfig(const std::vector<std::string>& models) {
  RunConfig c;
  for (const std::string& m : models) c.models.push_back(ParseModelFlag(m));
  c.auditing_set_path = "in-memory";
  c.sampling.master_seed = 20260101;
  return c;
}

Outcome PriorSensitive() {
  Outcome o;
  const AuditingSet& set = SyntheticSet();
  if (set.targets.size() < 50) o.Fail("fewer than 50 targets");
  const auto start = std::chrono::steady_clock::now();
  const AuditReport r = RunAudit(AuditConfig({"prior=oracle:prior_sensitive"}), set);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start).count();
  const ModelReport& m = r.models.at(0);
  size_t nonzero = 0;
  double worst = 0.0;
  for (const PerInputMetrics& x : m.per_input.at(0)) {
    if (x.m_mech == 0.0) continue;
    ++nonzero;
    worst = std::max(worst, std::abs(x.rs - 1.0));
  }
  if (nonzero == 0) o.Fail("no input with a nonzero mechanistic median");
  if (worst > 1e-9) o.Fail(Fmt("max |RS - 1| = %.3g", worst));
  for (const ResponseSet& s : m.responses.at(0)) {
    for (double d : s.spur_deltas) {
      if (d != 0.0) o.Fail("nonzero spurious delta on " + s.pair_id);
    }
  }
  if (secs >= 30.0) o.Fail(Fmt("runtime %.1f s", secs));
  if (o.pass) {
    o.detail = Fmt("%.0f inputs, max |RS-1| = %.1e", static_cast<double>(nonzero), worst) +
               Fmt(", %.2f s", secs);
  }
  return o;
}

Outcome ComplementSensitive() {
  Outcome o;
  const AuditReport r =
      RunAudit(AuditConfig({"comp=oracle:complement_sensitive"}), SyntheticSet());
  const ModelReport& m = r.models.at(0);
  for (const ResponseSet& s : m.responses.at(0)) {
    for (double d : s.mech_deltas) {
      if (d != 0.0) o.Fail("nonzero mechanistic delta on " + s.pair_id);
    }
  }
  const double rs = m.metrics.at("rs").mean;
  if (!(rs <= 0.05)) o.Fail(Fmt("RS = %.4f", rs));
  if (o.pass) o.detail = Fmt("RS = %.4f", rs);
  return o;
}

Outcome ConstantOracle() {
  Outcome o;
  const AuditReport r = RunAudit(AuditConfig({"const=oracle:constant"}), SyntheticSet());
  const ModelReport& m = r.models.at(0);
  const AggregatedMetric& rs = m.metrics.at("rs");
  if (rs.mean != 0.5 || rs.ci_low != 0.5 || rs.ci_high != 0.5) {
    o.Fail(Fmt("RS = %.17g", rs.mean));
  }
  if (m.metrics.at("c_sep").mean != 0.0) o.Fail("C_sep != 0");
  if (m.metrics.at("overlap").mean != 1.0) o.Fail("Overlap != 1");
  for (const PerInputMetrics& x : m.per_input.at(0)) {
    if (x.rs != 0.5) o.Fail("per-input RS != 0.5 on " + x.pair_id);
  }
  for (const ResponseSet& s : m.responses.at(0)) {
    for (double d : s.mech_deltas) if (d != 0.0) o.Fail("nonzero delta");
    for (double d : s.spur_deltas) if (d != 0.0) o.Fail("nonzero delta");
  }
  if (o.pass) o.detail = "RS 0.5, C_sep 0, Overlap 1, deltas 0";
  return o;
}

Outcome MetricOracles() {
  Outcome o;
  SplitMix64 rng(99);
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> v(1 + rng.UniformBelow(8));
    for (double& x : v) {
      // Mix of continuous values and ties.
      x = rng.UniformBelow(3) == 0 ? static_cast<double>(rng.UniformBelow(4))
                                   : uniform() * 20.0 - 10.0;
    }
    for (double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0, uniform()}) {
      const double got = Quantile(v, q);
      worst = std::max({worst, std::abs(got - testing::SortQuantile(v, q)),
                        std::abs(got - testing::BruteQuantile(v, q))});
    }
    worst = std::max(worst, std::abs(Median(v) - testing::SortQuantile(v, 0.5)));
    worst = std::max(worst, std::abs(InterquartileRange(v) -
                                     (testing::SortQuantile(v, 0.75) -
                                      testing::SortQuantile(v, 0.25))));
  }
  if (worst > 1e-12) o.Fail(Fmt("quantile max error %.3g", worst));

  double worst_auc = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + rng.UniformBelow(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) {
      scores[i] = trial % 2 ? static_cast<double>(rng.UniformBelow(10)) : uniform();
      labels[i] = static_cast<int>(rng.UniformBelow(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    worst_auc = std::max(worst_auc, std::abs(Auroc(scores, labels) -
                                             testing::BruteAuroc(scores, labels)));
  }
  if (worst_auc > 1e-12) o.Fail(Fmt("AUROC max error %.3g", worst_auc));
  if (o.pass) o.detail = Fmt("max err quantile %.1e, AUROC %.1e", worst, worst_auc);
  return o;
}

Outcome MatchedDesign() {
  Outcome o;
  const AuditingSet& set = SyntheticSet();
  size_t checked = 0;
  const double fractions[] = {0.25, 0.1, 0.5, 1.0};
  for (uint64_t seed = 0; checked < 100000; ++seed) {
    SamplingPlan plan;
    plan.master_seed = seed;
    plan.scope_fraction = fractions[seed % 4];
    for (const TargetRecord& t : set.targets) {
      const std::set<ResidueIndex> prior(t.prior_scope.begin(), t.prior_scope.end());
      const size_t k = ScopeCardinality(t.prior_scope.size(), plan.scope_fraction);
      for (const MatchedPair& p : SampleMatchedPairs(t, plan)) {
        ++checked;
        const auto& mech = p.mech.scope.indices;
        const auto& spur = p.spur.scope.indices;
        if (mech.size() != spur.size() || mech.size() != k) {
          o.Fail("cardinality mismatch in " + p.mech.intervention_id);
        }
        for (ResidueIndex i : mech) {
          if (!prior.count(i)) o.Fail("mechanistic index off prior");
        }
        for (ResidueIndex i : spur) {
          if (prior.count(i) || i < 1 || i > t.length()) {
            o.Fail("spurious index in prior or out of range");
          }
        }
        if (std::set<ResidueIndex>(mech.begin(), mech.end()).size() != mech.size() ||
            std::set<ResidueIndex>(spur.begin(), spur.end()).size() != spur.size()) {
          o.Fail("repeated index in scope");
        }
      }
    }
  }
  if (o.pass) o.detail = Fmt("%.0f pairs, 100%% matched", static_cast<double>(checked));
  return o;
}

bool SameValue(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

Outcome AffineInvariance() {
  Outcome o;
  size_t compared = 0;
  for (const char* kind : {"prior_sensitive", "complement_sensitive",
                           "composition_shortcut", "constant", "echo_length"}) {
    RunConfig c = AuditConfig({std::string("base=oracle:") + kind,
                               std::string("aff=oracle:") + kind});
    c.models[1].affine = std::make_pair(3.0, 7.0);
    c.n_runs = 2;
    const AuditReport r = RunAudit(c, SyntheticSet());
    const ModelReport& a = r.models[0];
    const ModelReport& b = r.models[1];
    for (const char* name : {"rs", "c_sep", "overlap", "sc", "msr", "md"}) {
      const AggregatedMetric& x = a.metrics.at(name);
      const AggregatedMetric& y = b.metrics.at(name);
      ++compared;
      bool same = SameValue(x.mean, y.mean) && SameValue(x.std, y.std) &&
                  SameValue(x.ci_low, y.ci_low) && SameValue(x.ci_high, y.ci_high);
      for (size_t i = 0; i < x.per_run.size(); ++i) {
        same = same && SameValue(x.per_run[i], y.per_run[i]);
      }
      if (!same) o.Fail(std::string(kind) + ": " + name + " changed");
    }
    for (size_t run = 0; run < a.per_input.size(); ++run) {
      for (size_t i = 0; i < a.per_input[run].size(); ++i) {
        const PerInputMetrics& x = a.per_input[run][i];
        const PerInputMetrics& y = b.per_input[run][i];
        if (y.m_mech != 3.0 * x.m_mech || y.m_spur != 3.0 * x.m_spur) {
          o.Fail(std::string(kind) + ": medians not scaled by 3");
        }
        if (x.rs != y.rs || x.sc != y.sc || x.md != y.md || x.msr != y.msr) {
          o.Fail(std::string(kind) + ": per-input metric changed");
        }
      }
    }
  }
  if (o.pass) {
    o.detail = Fmt("%.0f aggregated metrics identical under 3s+7",
                   static_cast<double>(compared));
  }
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  Outcome o;
  RunConfig c = AuditConfig({"p=oracle:prior_sensitive", "s=oracle:composition_shortcut"});
  c.n_runs = 2;
  c.emit.dump_interventions = true;
  c.emit.per_input = true;
  const fs::path root =
      fs::temp_directory_path() / ("isaac_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const AuditReport r1 = RunAudit(c, SyntheticSet());
  const AuditReport r2 = RunAudit(c, SyntheticSet());
  const auto files = EmitReport(r1, c, root / "a");
  EmitReport(r2, c, root / "b");
  size_t compared = 0;
  for (const fs::path& f : files) {
    const fs::path rel = fs::relative(f, root / "a");
    std::string x = Slurp(f);
    std::string y = Slurp(root / "b" / rel);
    if (rel == "report.json") {
      auto strip = [](const std::string& s) {
        nlohmann::json doc = nlohmann::json::parse(s);
        doc.erase("provenance");
        return doc.dump(2);
      };
      x = strip(x);
      y = strip(y);
    }
    ++compared;
    if (x != y) o.Fail("differs: " + rel.string());
  }
  if (ReportToJson(r1, false).dump() != ReportToJson(r2, false).dump()) {
    o.Fail("in-memory reports differ");
  }
  for (size_t run = 0; run < 2; ++run) {
    const std::string tag = ".run" + std::to_string(run) + ".tsv";
    if (Slurp(root / "a/interventions" / ("p" + tag)) !=
        Slurp(root / "a/interventions" / ("s" + tag))) {
      o.Fail("intervention dumps differ across models");
    }
    if (r1.models[0].intervention_digests[run] !=
        r1.models[1].intervention_digests[run]) {
      o.Fail("realized sequences differ across models");
    }
  }
  fs::remove_all(root);
  if (o.pass) o.detail = Fmt("%.0f files identical", static_cast<double>(compared));
  return o;
}

Outcome Geometry() {
  struct Case {
    std::vector<ResidueIndex> indices;
    size_t spread;
    double contiguity;
  };
  const std::vector<Case> table = {
      {{7}, 0, 0.0},
      {{1}, 0, 0.0},
      {{3, 4, 5}, 2, 1.0},
      {{5, 6, 7, 20}, 15, 0.75},
      {{10, 50, 100}, 90, 0.0},
      {{1, 600}, 599, 0.0},
      {{1, 2}, 1, 1.0},
      {{1, 5}, 4, 0.0},
      {{1, 3, 5}, 4, 0.0},
      {{2, 3, 10, 11}, 9, 1.0},
      {{4, 5, 6, 8}, 4, 0.75},
      {{1, 2, 4, 6, 7}, 6, 0.8},
      {{100, 101, 102, 103, 104, 105, 106, 107}, 7, 1.0},
      {{9, 20, 21, 40}, 31, 0.5},
      {{12, 14, 16, 18, 19}, 7, 0.4},
      {{1, 2, 3, 50, 98, 99, 100}, 99, 6.0 / 7.0},
      {{30, 10, 20}, 20, 0.0},
      {{8, 6, 7}, 2, 1.0},
      {{250, 251, 400, 402, 404, 405}, 155, 4.0 / 6.0},
      {{15, 17, 18, 19, 21, 40, 41, 43, 60, 61}, 46, 0.7},
  };
  Outcome o;
  for (size_t i = 0; i < table.size(); ++i) {
    const Scope s{table[i].indices, ScopeClass::kMechanistic};
    if (ScopeSpread(s) != table[i].spread) {
      o.Fail(Fmt("case %.0f spread %.0f", static_cast<double>(i),
                 static_cast<double>(ScopeSpread(s))));
    }
    if (std::abs(ScopeContiguity(s) - table[i].contiguity) > 1e-15) {
      o.Fail(Fmt("case %.0f contiguity %.6f", static_cast<double>(i),
                 ScopeContiguity(s)));
    }
  }
  if (o.pass) o.detail = Fmt("%.0f fixture cases", static_cast<double>(table.size()));
  return o;
}

Outcome BootstrapDegeneracy() {
  Outcome o;
  const MetricFn rs = [](std::span<const ResponseSet> s) {
    return ComputeModelMetrics(s).rs_mean;
  };
  const MultiMetricFn all = [](std::span<const ResponseSet> s) {
    const ModelMetrics m = ComputeModelMetrics(s);
    return std::vector<double>{m.rs_mean, m.c_sep, m.overlap};
  };
  const std::vector<ResponseSet> flat(30, ResponseSet{"x", {0.4, 0.4, 0.4}, {0.1, 0.1}});
  for (const MetricWithCI& ci : HierarchicalBootstrap(flat, all, {1000, 0.95, 1})) {
    if (ci.ci_low != ci.point || ci.ci_high != ci.point) {
      o.Fail(Fmt("interval [%.6g, %.6g] not collapsed", ci.ci_low, ci.ci_high));
    }
  }

  SplitMix64 rng(5);
  std::vector<ResponseSet> noisy;
  for (int i = 0; i < 25; ++i) {
    ResponseSet s{"n" + std::to_string(i), {}, {}};
    for (int j = 0; j < 8; ++j) {
      s.mech_deltas.push_back(static_cast<double>(rng.UniformBelow(1000)) / 500.0 - 1.0);
      s.spur_deltas.push_back(static_cast<double>(rng.UniformBelow(1000)) / 900.0 - 0.5);
    }
    noisy.push_back(std::move(s));
  }
  const MultiMetricFn one = [&rs](std::span<const ResponseSet> s) {
    return std::vector<double>{rs(s)};
  };
  const auto reps = BootstrapReplicates(noisy, one, {1000, 0.95, 9});
  double prev = -1.0;
  for (int i = 0; i <= 98; ++i) {
    const double level = 0.01 + 0.01 * i;
    const MetricWithCI ci = PercentileInterval(0.0, reps[0], level);
    const double width = ci.ci_high - ci.ci_low;
    if (width < prev) o.Fail(Fmt("width shrinks at level %.2f", level));
    prev = width;
  }
  if (prev <= 0.0) o.Fail("degenerate noisy replicates");
  if (o.pass) o.detail = "collapsed on constant data, width monotone";
  return o;
}

}  // namespace
}  // namespace isaac

int main() {
  using namespace isaac;
  Report("prior_sensitive_oracle", PriorSensitive);
  Report("complement_sensitive_oracle", ComplementSensitive);
  Report("constant_oracle", ConstantOracle);
  Report("metric_oracle_equivalence", MetricOracles);
  Report("matched_design", MatchedDesign);
  Report("positive_affine_invariance", AffineInvariance);
  Report("determinism", Determinism);
  Report("geometry_definitions", Geometry);
  Report("bootstrap_degeneracy", BootstrapDegeneracy);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
