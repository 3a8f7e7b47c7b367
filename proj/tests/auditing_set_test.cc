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

#include "isaac/auditing_set.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "isaac/random.h"
#include "synthetic.h"

namespace isaac {
namespace {

using ::testing::HasSubstr;

constexpr char kHeader[] = "target_id\tsequence\tprior_indices\tprior_residues\n";

LoadResult<TargetRecord> Parse(const std::string& body) {
  std::istringstream in(kHeader + body);
  return ParseTargets(in, "t.tsv");
}

TargetRecord Target(std::string id, std::string seq,
                    std::vector<ResidueIndex> prior,
                    std::optional<std::map<ResidueIndex, char>> expected = {}) {
  return TargetRecord{std::move(id), std::move(seq), std::move(prior),
                      std::move(expected)};
}

TEST(ParseTargetsTest, ReadsWellFormedRows) {
  const auto r = Parse(
      "A\tMKV\t2\t2:K\n"
      "B\tMKVR\t2,3\t\n"
      "C\tACDEF\t1,5\t1:A,5:F\n");
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.records[1].prior_scope, (std::vector<ResidueIndex>{2, 3}));
  EXPECT_FALSE(r.records[1].prior_residues.has_value());
  EXPECT_EQ(r.records[2].prior_residues->at(5), 'F');
}

TEST(ParseTargetsTest, ExcludesZeroIndexWithLineNumber) {
  const auto r = Parse("A\tMKV\t2\t\nB\tMKV\t0\t\n");
  ASSERT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_THAT(r.warnings[0], HasSubstr("t.tsv:3"));
  EXPECT_THAT(r.warnings[0], HasSubstr("index out of range"));
}

TEST(ParseTargetsTest, HeaderOnlyGivesEmptyListAndWarning) {
  const auto r = Parse("");
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_THAT(r.warnings[0], HasSubstr("no target rows"));
}

TEST(ParseTargetsTest, MalformedHeaderIsFatal) {
  std::istringstream in("id\tseq\n");
  EXPECT_THROW(ParseTargets(in), AuditError);
  std::istringstream empty("");
  EXPECT_THROW(ParseTargets(empty), AuditError);
}

TEST(ParseTargetsTest, BadColumnsAndTokensAreExcluded) {
  const auto r = Parse(
      "A\tMKV\n"
      "B\tMKV\tx\t\n"
      "C\tMKV\t2\t2K\n"
      "D\tMKV\t\t\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].target_id, "D");
  EXPECT_TRUE(r.records[0].prior_scope.empty());
  EXPECT_EQ(r.warnings.size(), 3u);
}

TEST(LoadTargetsTest, UnreadableFileIsFatal) {
  EXPECT_THROW(LoadTargets("/nonexistent/targets.tsv"), AuditError);
}

TEST(ParsePairsTest, ParsesLabelsAndRejectsBadOnes) {
  std::istringstream in(
      "pair_id\tdrug\ttarget_id\tlabel\n"
      "p1\tCCO\tA\t1\n"
      "p2\tCCN\tA\t\n"
      "p3\tCCC\tA\t2\n"
      "p4\tCCC\tA\n");
  const auto r = ParsePairs(in);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].label, 1);
  EXPECT_FALSE(r.records[1].label.has_value());
  EXPECT_FALSE(r.records[2].label.has_value());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_THAT(r.warnings[0], HasSubstr("label"));
}

TEST(IsRealizableTest, AllClausesHold) {
  const TargetRecord t = Target("A", "MKVR", {2, 3}, {{{2, 'K'}, {3, 'V'}}});
  const Realizability r = IsRealizable(t, 2);
  EXPECT_TRUE(r.realizable) << r.reason;
}

TEST(IsRealizableTest, ResidueMismatch) {
  const Realizability r = IsRealizable(Target("A", "MKVR", {2}, {{{2, 'A'}}}), 1);
  EXPECT_FALSE(r.realizable);
  EXPECT_EQ(r.reason, "residue mismatch at 2");
}

TEST(IsRealizableTest, EmptyComplement) {
  const Realizability r = IsRealizable(Target("A", "MK", {1, 2}), 1);
  EXPECT_FALSE(r.realizable);
  EXPECT_EQ(r.reason, "empty complement");
}

TEST(IsRealizableTest, ComplementTooSmallOrPriorEmpty) {
  EXPECT_FALSE(IsRealizable(Target("A", "MKVR", {1, 2, 3}), 2));
  EXPECT_TRUE(IsRealizable(Target("A", "MKVR", {1, 2, 3}), 1));
  EXPECT_EQ(IsRealizable(Target("A", "MKVR", {}), 1).reason, "empty prior");
}

TEST(CompileTest, ResidueMismatchIsFilteredAndCounted) {
  std::vector<TargetRecord> targets = {
      Target("A", "MKVR", {2}, {{{2, 'K'}}}),
      Target("B", "MKVR", {2}, {{{2, 'A'}}})};
  std::vector<PairRecord> pairs = {{"p1", "CCO", "A", 1},
                                   {"p2", "CCO", "B", 0}};
  const AuditingSet set = Compile(targets, pairs, CompileConfig{});
  EXPECT_EQ(set.coverage.n_targets_total, 2u);
  EXPECT_EQ(set.coverage.n_with_prior, 2u);
  EXPECT_EQ(set.coverage.n_realizable, 1u);
  ASSERT_EQ(set.pairs.size(), 1u);
  EXPECT_EQ(set.pairs[0].pair_id, "p1");
  EXPECT_THAT(set.warnings.back(), HasSubstr("p2"));
}

TEST(CompileTest, AllRealizableKeepsEveryAnnotatedTarget) {
  const AuditingSet set = testing::MakeSyntheticSet({.n_targets = 12});
  EXPECT_EQ(set.coverage.n_realizable, set.coverage.n_with_prior);
  EXPECT_EQ(set.targets.size(), 12u);
}

TEST(CompileTest, EmptyResultIsFatal) {
  std::vector<TargetRecord> targets = {Target("A", "MK", {1, 2})};
  EXPECT_THROW(Compile(targets, {}, CompileConfig{}), AuditError);
}

TEST(CompileTest, DuplicateIdsAreFatal) {
  std::vector<TargetRecord> targets = {Target("A", "MKV", {1}),
                                       Target("A", "MKV", {2})};
  EXPECT_THROW(Compile(targets, {}, CompileConfig{}), AuditError);
}

TEST(CompileTest, TargetsWithoutPriorCountOnlyTowardsTotal) {
  std::vector<TargetRecord> targets = {Target("A", "MKV", {1}),
                                       Target("B", "MKV", {})};
  const AuditingSet set = Compile(targets, {}, CompileConfig{});
  EXPECT_EQ(set.coverage.n_targets_total, 2u);
  EXPECT_EQ(set.coverage.n_with_prior, 1u);
  EXPECT_EQ(set.coverage.n_realizable, 1u);
}

TEST(CompileTest, PermutationInvariant) {
  testing::SyntheticOptions opt{.n_targets = 20, .drugs_per_target = 2};
  std::vector<TargetRecord> targets = testing::MakeSyntheticTargets(opt);
  targets[3].prior_residues->begin()->second = 'X';  // one mismatch
  std::vector<PairRecord> pairs = testing::MakeSyntheticPairs(targets, opt);
  const std::string reference =
      ToJson(Compile(targets, pairs, CompileConfig{})).dump();
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(targets.begin(), targets.end(), rng);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const AuditingSet set = Compile(targets, pairs, CompileConfig{});
    nlohmann::json doc = ToJson(set);
    EXPECT_EQ(doc.dump(), reference);
  }
}

TEST(CompileTest, AddingTargetsNeverRemovesRetainedOnes) {
  testing::SyntheticOptions opt{.n_targets = 30};
  std::vector<TargetRecord> all = testing::MakeSyntheticTargets(opt);
  for (size_t i = 0; i < all.size(); i += 4) all[i].prior_residues->begin()->second = 'X';
  std::set<std::string> previous;
  for (size_t n = 1; n <= all.size(); ++n) {
    std::vector<TargetRecord> prefix(all.begin(), all.begin() + n);
    std::set<std::string> retained;
    try {
      for (const TargetRecord& t : Compile(prefix, {}, CompileConfig{}).targets) {
        retained.insert(t.target_id);
      }
    } catch (const AuditError&) {
      // prefix with no realizable target
    }
    EXPECT_TRUE(std::includes(retained.begin(), retained.end(), previous.begin(),
                              previous.end()));
    previous = retained;
  }
}

TEST(CompileTest, EveryRetainedTargetAdmitsMatchedScope) {
  const AuditingSet set = testing::MakeSyntheticSet({.n_targets = 25});
  for (const TargetRecord& t : set.targets) {
    EXPECT_GE(t.Complement().size(), ScopeCardinality(t.prior_scope.size(), 0.25));
  }
}

TEST(CoverageSummaryTest, SingleTarget) {
  AuditingSet set;
  std::vector<ResidueIndex> prior(85);
  for (ResidueIndex i = 0; i < 85; ++i) prior[i] = i + 1;
  set.targets.push_back(Target("A", std::string(200, 'A'), prior));
  const CoverageStats c = CoverageSummary(set);
  EXPECT_EQ(c.median_prior_size, 85.0);
  EXPECT_EQ(c.iqr_prior_size, 0.0);
}

TEST(CoverageSummaryTest, LinearInterpolationQuartiles) {
  AuditingSet set;
  for (size_t size : {80, 85, 90}) {
    std::vector<ResidueIndex> prior(size);
    for (ResidueIndex i = 0; i < size; ++i) prior[i] = i + 1;
    set.targets.push_back(
        Target("T" + std::to_string(size), std::string(200, 'A'), prior));
  }
  const CoverageStats c = CoverageSummary(set);
  EXPECT_EQ(c.median_prior_size, 85.0);
  EXPECT_EQ(c.iqr_prior_size, 5.0);
}

TEST(AuditingSetJsonTest, SaveLoadPreservesEverything) {
  const AuditingSet set =
      testing::MakeSyntheticSet({.n_targets = 8, .drugs_per_target = 3});
  const auto path = std::filesystem::temp_directory_path() / "isaac_set_test.json";
  SaveAuditingSet(set, path);
  const AuditingSet back = LoadAuditingSet(path);
  EXPECT_EQ(back.targets, set.targets);
  EXPECT_EQ(back.pairs, set.pairs);
  EXPECT_EQ(back.coverage, set.coverage);
  std::filesystem::remove(path);
}

TEST(AuditingSetJsonTest, RejectsWrongSchema) {
  nlohmann::json doc = ToJson(testing::MakeSyntheticSet({.n_targets = 2}));
  doc["schema"] = "something/else";
  EXPECT_THROW(AuditingSetFromJson(doc), AuditError);
}

}  // namespace
}  // namespace isaac
