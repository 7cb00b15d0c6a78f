// Copyright 2026 The Retro Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <chrono>

#include "retro/error.h"
#include "retro/probe_cache.h"
#include "retro/retrospect.h"
#include "retro/rng.h"
#include "retro/serialization.h"
#include "retro/synthetic_world.h"

namespace retro {
namespace {

namespace chr = std::chrono;

int ChronoDays(int y1, unsigned m1, unsigned d1, int y2, unsigned m2, unsigned d2) {
  return (chr::sys_days(chr::year(y2) / chr::month(m2) / chr::day(d2)) -
          chr::sys_days(chr::year(y1) / chr::month(m1) / chr::day(d1)))
      .count();
}

TEST(DelaysTest, PreEpochGuiltyExample) {
  const auto [d1, d2] = ComputeDelays(Day::FromIso("2014-08-08"), Day::FromIso("2020-09-20"),
                                      Day::FromIso("2020-11-16"), SyzbotStart());
  EXPECT_EQ(d2, 57);
  EXPECT_EQ(d1, ChronoDays(2017, 7, 22, 2020, 9, 20));
}

TEST(DelaysTest, RevealOnFindingDay) {
  const Day d = Day::FromIso("2021-03-03");
  EXPECT_EQ(ComputeDelays(d - 100, d, d, SyzbotStart()).second, 0);
}

TEST(DelaysTest, DisorderIsRejected) {
  const Day d = Day::FromIso("2021-03-03");
  EXPECT_THROW(ComputeDelays(d, d - 1, d + 5, SyzbotStart()), Error);
  EXPECT_THROW(ComputeDelays(d - 9, d, d - 1, SyzbotStart()), Error);
  EXPECT_THROW(ComputeDelays(Day::FromIso("2015-01-01"), Day::FromIso("2017-01-01"),
                             Day::FromIso("2018-01-01"), SyzbotStart()),
               Error);
}

TEST(DelaysTest, ConservationOverRandomFixtures) {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const Day guilty = Day::FromCivil(2005, 1, 1) + static_cast<int32_t>(rng.UniformInt(0, 6500));
    const Day lower = std::max(guilty, SyzbotStart());
    const Day reveal = lower + static_cast<int32_t>(rng.UniformInt(0, 1500));
    const Day found = reveal + static_cast<int32_t>(rng.UniformInt(0, 400));
    const auto [d1, d2] = ComputeDelays(guilty, reveal, found, SyzbotStart());
    EXPECT_EQ(d1 + d2, found - lower);
    EXPECT_GE(d1, 0);
    EXPECT_GE(d2, 0);
  }
}

ProbeResult NotFound(std::vector<std::string> crashes, bool cached = false) {
  ProbeResult p;
  p.outcome.status = SessionStatus::kNotFound;
  p.outcome.observed_crashes = std::move(crashes);
  p.cached = cached;
  return p;
}

TEST(BlockingCandidatesTest, CoOccurrenceRate) {
  std::vector<ProbeResult> log = {NotFound({"x1", "x1", "n2"}), NotFound({"x1"}),
                                  NotFound({"n2", "self"}), NotFound({}),
                                  NotFound({"x1", "n2"}, true)};
  ProbeResult found;
  found.outcome.status = SessionStatus::kFound;
  found.outcome.observed_crashes = {"x9", "x9"};
  log.push_back(found);
  const auto c = DetectBlockingCandidates(log, "self", 0.5);
  // x1 appears in 2 of 4 fresh not-found sessions, n2 in 2 of 4.
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].bug_id, "n2");
  EXPECT_DOUBLE_EQ(c[0].rate, 0.5);
  EXPECT_EQ(c[1].bug_id, "x1");
  EXPECT_TRUE(DetectBlockingCandidates(log, "self", 0.75).empty());
  EXPECT_TRUE(DetectBlockingCandidates({}, "self", 0.5).empty());
}

TEST(ClassifyTest, Rules) {
  BugRecord bug;
  bug.id = "b";
  bug.guilty_commits = {"g"};
  RetrospectOptions options;
  const std::map<std::string, std::vector<std::string>> fixes = {{"x1", {"fixcommit"}}};
  const std::vector<BlockingCandidate> candidates = {{"x1", 0.8}};
  Commit plain{"k1", SyzbotStart(), 0, {}, "net: tweak", {"net/core/dev.c"}};
  EXPECT_EQ(ClassifyFactor(plain, bug, candidates, fixes, options), FactorClass::kKernelCommit);
  Commit guilty = plain;
  guilty.id = "g";
  EXPECT_EQ(ClassifyFactor(guilty, bug, candidates, fixes, options), FactorClass::kNeverHidden);
  Commit by_path = plain;
  by_path.touched_paths = {"mm/kasan/report.c"};
  EXPECT_EQ(ClassifyFactor(by_path, bug, candidates, fixes, options),
            FactorClass::kSanitizerCommit);
  Commit by_message = plain;
  by_message.message = "KMSAN: instrument copy_to_user";
  EXPECT_EQ(ClassifyFactor(by_message, bug, candidates, fixes, options),
            FactorClass::kSanitizerCommit);
  Commit fix = plain;
  fix.id = "fixcommit";
  EXPECT_EQ(ClassifyFactor(fix, bug, candidates, fixes, options), FactorClass::kBlockingBug);
  EXPECT_EQ(ClassifyFactor(fix, bug, {}, fixes, options), FactorClass::kKernelCommit);
  fix.touched_paths = {"lib/ubsan.c"};
  EXPECT_EQ(ClassifyFactor(fix, bug, candidates, fixes, options),
            FactorClass::kNeedsManualReview);
}

TEST(DuplicatesTest, SharedFixesGroup) {
  std::vector<BugRecord> bugs(4);
  bugs[0].id = "a";
  bugs[0].fix_commits = {"f1"};
  bugs[1].id = "b";
  bugs[1].fix_commits = {"f2", "f1"};
  bugs[2].id = "c";
  bugs[2].fix_commits = {"f3"};
  bugs[3].id = "d";
  bugs[3].fix_commits = {"f4"};
  for (auto &b : bugs) b.crash_function = "other_fn";
  bugs[2].crash_function = "same_fn";
  bugs[3].crash_function = "same_fn";
  const DuplicateGroups g = GroupDuplicates(bugs);
  EXPECT_EQ(g.groups, (std::vector<std::vector<std::string>>{{"a", "b"}, {"c"}, {"d"}}));
  ASSERT_EQ(g.suggestions.size(), 1u);
  EXPECT_EQ(g.suggestions[0], (std::pair<std::string, std::string>{"c", "d"}));
}

TEST(ReportStatusTest, Names) {
  for (auto s : {ReportStatus::kCompleted, ReportStatus::kSkippedUnreproducible,
                 ReportStatus::kNeverDescribable, ReportStatus::kUnstableRange}) {
    EXPECT_EQ(ParseReportStatus(ToString(s)), s);
  }
  EXPECT_THROW(ParseReportStatus("done"), Error);
}

struct Harness {
  explicit Harness(WorldSpec spec) : world(GenerateWorld(spec)), fixes(world.FixIndex()) {}
  RetroContext Context(ProbeCache *cache = nullptr) const {
    return {world.target_axis(), world.fuzzer_axis(), world.descriptions(), world, cache,
            &world.toolchains(), &world.patches(), &fixes};
  }
  SyntheticWorld world;
  std::map<std::string, std::vector<std::string>> fixes;
};

WorldSpec Spec(uint64_t seed, int bugs) {
  WorldSpec s;
  s.seed = seed;
  s.bugs = bugs;
  return s;
}

TEST(RetrospectTest, DeterministicWorldExactRecovery) {
  Harness h(Spec(21, 80));
  RetrospectOptions options;
  for (const BugRecord &bug : h.world.bugs()) {
    const auto r = RetrospectBug(bug, h.Context(), options);
    const BugTruth &t = h.world.Truth(bug.id);
    ASSERT_EQ(r.status, ReportStatus::kCompleted) << bug.id;
    EXPECT_EQ(r.factor_class, t.factor) << bug.id;
    EXPECT_EQ(r.revealing_commit, t.revealing_commit) << bug.id;
    if (t.factor != FactorClass::kNeverHidden) {
      EXPECT_EQ(r.revealing_axis, t.revealing_axis);
    }
    ASSERT_TRUE(r.d1_days && r.d2_days);
    EXPECT_EQ(*r.d1_days + *r.d2_days,
              bug.finding_date - std::max(bug.guilty_date, SyzbotStart()));
    EXPECT_FALSE(r.focused_set_hash.empty());
    ASSERT_TRUE(r.budget);
  }
}

TEST(RetrospectTest, PreliminaryUsesFindingEnvironment) {
  Harness h(Spec(22, 10));
  const BugRecord &bug = h.world.bugs()[0];
  const auto pre = Preliminary(bug, h.Context(), RetrospectOptions{});
  EXPECT_EQ(pre.status, ReportStatus::kCompleted);
  EXPECT_EQ(pre.finding_env.target_commit, bug.finding_commit);
  EXPECT_EQ(pre.trials.size(), 3u);
  ASSERT_TRUE(pre.budget);
  EXPECT_TRUE(pre.focused.Contains(bug.reproducer_calls[0]));
}

TEST(RetrospectTest, UndescribedReproducerIsNeverDescribable) {
  Harness h(Spec(23, 5));
  BugRecord bug = h.world.bugs()[0];
  bug.reproducer_calls = {"ioctl$nowhere"};
  const auto r = RetrospectBug(bug, h.Context(), RetrospectOptions{});
  EXPECT_EQ(r.status, ReportStatus::kNeverDescribable);
  EXPECT_TRUE(r.session_log.empty());
}

TEST(RetrospectTest, UnreproducibleIsSkipped) {
  Harness h(Spec(24, 40));
  const Day fuzzer_start = h.world.fuzzer_axis().oldest().day;
  int tried = 0;
  for (BugRecord bug : h.world.bugs()) {
    // Before the guilty commit nothing is findable.
    const Commit &guilty = h.world.target_axis().Get(bug.guilty_commits[0]);
    if (guilty.parents.empty()) continue;
    const Commit &parent = h.world.target_axis().Get(guilty.parents[0]);
    if (parent.day < fuzzer_start) continue;
    bug.finding_commit = parent.id;
    bug.finding_date = parent.day;
    const auto r = RetrospectBug(bug, h.Context(), RetrospectOptions{});
    EXPECT_EQ(r.status, ReportStatus::kSkippedUnreproducible) << bug.id;
    EXPECT_EQ(r.session_log.size(), 3u);
    if (++tried == 3) break;
  }
  EXPECT_GT(tried, 0);
}

TEST(RetrospectTest, PersistentCacheIsTransparent) {
  Harness h(Spec(25, 15));
  ProbeCache cache;
  RetrospectOptions options;
  RetroStats cold, warm;
  for (const BugRecord &bug : h.world.bugs()) {
    const auto a = RetrospectBug(bug, h.Context(&cache), options, &cold);
    const auto b = RetrospectBug(bug, h.Context(&cache), options, &warm);
    EXPECT_EQ(Json(a).dump(), Json(b).dump()) << bug.id;
  }
  EXPECT_GT(cold.oracle_sessions, 0);
  EXPECT_EQ(warm.oracle_sessions, 0);
  EXPECT_EQ(warm.cache_hits, cold.oracle_sessions);
}

TEST(RetrospectTest, StochasticWorldMostlyRecovered) {
  WorldSpec spec = Spec(26, 60);
  spec.p_min = 0.9;
  spec.p_max = 0.9;
  spec.random_find_times = true;
  Harness h(spec);
  int completed = 0, correct = 0;
  for (const BugRecord &bug : h.world.bugs()) {
    const auto r = RetrospectBug(bug, h.Context(), RetrospectOptions{});
    if (r.status != ReportStatus::kCompleted) continue;
    ++completed;
    correct += r.revealing_commit == h.world.Truth(bug.id).revealing_commit;
  }
  EXPECT_GE(correct, 48);
  EXPECT_GE(completed, 50);
}

TEST(RetrospectTest, UnstableRangesCarryBounds) {
  WorldSpec spec = Spec(27, 80);
  spec.unstable_density = 0.08;
  Harness h(spec);
  int ranges = 0;
  for (const BugRecord &bug : h.world.bugs()) {
    const auto r = RetrospectBug(bug, h.Context(), RetrospectOptions{});
    if (r.status == ReportStatus::kUnstableRange) {
      ++ranges;
      EXPECT_TRUE(r.revealing_range_older);
      EXPECT_FALSE(r.revealing_commit.empty());
      EXPECT_FALSE(r.unstable_commits.empty());
    } else if (r.status == ReportStatus::kCompleted &&
               r.factor_class != FactorClass::kNeedsManualReview) {
      EXPECT_EQ(r.revealing_commit, h.world.Truth(bug.id).revealing_commit) << bug.id;
    }
  }
  EXPECT_GT(ranges, 0);
}

TEST(RetrospectTest, BlockingBugsProduceCandidates) {
  WorldSpec spec = Spec(28, 40);
  spec.factor_mix = {{FactorClass::kBlockingBug, 1.0}};
  Harness h(spec);
  for (const BugRecord &bug : h.world.bugs()) {
    const auto r = RetrospectBug(bug, h.Context(), RetrospectOptions{});
    const BugTruth &t = h.world.Truth(bug.id);
    ASSERT_EQ(r.status, ReportStatus::kCompleted);
    EXPECT_EQ(r.factor_class, FactorClass::kBlockingBug) << bug.id;
    bool named = false;
    for (const auto &c : r.blocking_candidates) named |= c.bug_id == *t.blocker;
    EXPECT_TRUE(named) << bug.id;
  }
}

}  // namespace
}  // namespace retro
