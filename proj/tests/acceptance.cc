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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "retro/analytics.h"
#include "retro/bisect.h"
#include "retro/campaign.h"
#include "retro/error.h"
#include "retro/oracle.h"
#include "retro/probe_cache.h"
#include "retro/retrospect.h"
#include "retro/rng.h"
#include "retro/serialization.h"
#include "retro/synthetic_world.h"
#include "retro/syzlang.h"
#include "test_support.h"

namespace retro {
namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string &why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

std::string Format(const char *fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Run {
  explicit Run(const SyntheticWorld &w) : world(w), fixes(w.FixIndex()) {}
  RetroContext Context(ProbeCache *cache) const {
    return {world.target_axis(), world.fuzzer_axis(), world.descriptions(), world, cache,
            &world.toolchains(), &world.patches(), &fixes};
  }
  const SyntheticWorld &world;
  std::map<std::string, std::vector<std::string>> fixes;
};

Verdict BisectionEquivalence() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  int worst_slack = 1 << 30;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = static_cast<size_t>(rng.UniformInt(10, 2000));
    const size_t boundary = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(n) - 1));
    std::vector<bool> ok(n);
    for (size_t i = 0; i < n; ++i) ok[i] = i <= boundary;
    size_t linear = 0;
    while (linear + 1 < n && ok[linear + 1]) ++linear;
    int probes = 0;
    const BisectResult r = BisectEarliestSuccess(n, [&](size_t i) {
      ++probes;
      return ok[i] ? ProbeVerdict::kSuccess : ProbeVerdict::kFailure;
    });
    const int bound = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 2;
    worst_slack = std::min(worst_slack, bound - probes);
    v.Require(r.earliest_success == linear, "boundary mismatch at n=" + std::to_string(n));
    v.Require(probes <= bound, "probe bound exceeded at n=" + std::to_string(n));
  }
  const double secs = SecondsSince(start);
  v.Require(secs < 5, Format("took %.2fs", secs));
  if (v.pass) v.detail = Format("1000 axes, min probe slack %.0f, %.3fs", worst_slack, secs);
  return v;
}

WorldSpec AcceptanceSpec() {
  WorldSpec spec;
  spec.seed = 2026;
  spec.bugs = 200;
  return spec;
}

Verdict DeterministicRecovery(const SyntheticWorld &world) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const Run run(world);
  std::set<FactorClass> classes;
  int exact = 0;
  for (const BugRecord &bug : world.bugs()) {
    const BugTruth &t = world.Truth(bug.id);
    classes.insert(t.factor);
    const auto r = RetrospectBug(bug, run.Context(nullptr), RetrospectOptions{});
    const bool axis_ok = t.factor == FactorClass::kNeverHidden || r.revealing_axis == t.revealing_axis;
    if (r.status == ReportStatus::kCompleted && r.revealing_commit == t.revealing_commit &&
        r.factor_class == t.factor && axis_ok) {
      ++exact;
    }
  }
  const double secs = SecondsSince(start);
  v.Require(classes.size() == 6, "world lacks some outcome classes");
  v.Require(exact == 200, Format("%.0f/200 exact", exact));
  v.Require(secs < 60, Format("took %.2fs", secs));
  if (v.pass) v.detail = Format("200/200 exact, 6 classes, %.2fs", secs);
  return v;
}

Verdict ProbabilisticRobustness() {
  Verdict v;
  WorldSpec spec = AcceptanceSpec();
  spec.seed = 2027;
  spec.p_min = 0.9;
  spec.p_max = 0.9;
  spec.random_find_times = true;
  const SyntheticWorld world = GenerateWorld(spec);
  const Run run(world);
  int correct = 0, dated = 0;
  double error_days = 0;
  for (const BugRecord &bug : world.bugs()) {
    const BugTruth &t = world.Truth(bug.id);
    const auto r = RetrospectBug(bug, run.Context(nullptr), RetrospectOptions{});
    if (r.status != ReportStatus::kCompleted || !r.revealing_date) continue;
    correct += r.revealing_commit == t.revealing_commit && r.factor_class == t.factor;
    ++dated;
    error_days += std::abs(*r.revealing_date - t.revealing_date);
  }
  const double rate = correct / 200.0;
  const double mae = dated ? error_days / dated : 0;
  v.Require(rate >= 0.8, Format("recovery %.1f%%", rate * 100));
  v.detail = Format("recovery %.1f%%, mean abs revealing-date error %.2f days over %.0f", rate * 100,
                    mae, dated);
  if (!v.pass) v.detail = Format("recovery %.1f%% < 80%%", rate * 100);
  return v;
}

Verdict FocusingCorrectness() {
  Verdict v;
  Rng rng(404);
  int deletions = 0;
  for (int i = 0; i < 100 && v.pass; ++i) {
    const int entities = static_cast<int>(rng.UniformInt(50, 300));
    const auto g = testing::GenerateCorpus(rng.Next(), entities);
    std::vector<SourceFile> src = {{"gen.txt", g.text}};
    const DescriptionCorpus corpus = ParseDescriptions(src, false);
    const std::vector<std::string> seeds = {
        g.syscalls[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(g.syscalls.size()) - 1))]};
    const auto names = Focus(corpus, seeds).Names();
    const auto problem = testing::CheckFocused(g, names, seeds);
    v.Require(!problem, "corpus " + std::to_string(i) + ": " + problem.value_or(""));
    const std::set<std::string> syscalls(g.syscalls.begin(), g.syscalls.end());
    for (const std::string &n : names) {
      if (!syscalls.count(n) || n == seeds[0] || std::count(g.mandatory.begin(), g.mandatory.end(), n)) continue;
      auto fewer = names;
      fewer.erase(n);
      ++deletions;
      v.Require(testing::CheckFocused(g, fewer, seeds).has_value(),
                "corpus " + std::to_string(i) + ": " + n + " is redundant");
    }
  }
  const DescriptionCorpus example = testing::InoutCorpus(false);
  const std::vector<std::string> seeds = {"consumer"};
  auto names = Focus(example, seeds).Names();
  for (const auto &m : DefaultMandatoryCalls()) names.erase(m);
  v.Require(names == std::set<std::string>{"my_resource", "producer", "consumer", "parent", "child"},
            "inout example set differs");
  if (v.pass) v.detail = Format("100 corpora valid, %.0f deletions all invalid, inout example exact", deletions);
  return v;
}

Verdict LegacySemantics() {
  Verdict v;
  const DescriptionCorpus modern = testing::InoutCorpus(false);
  const DescriptionCorpus legacy = testing::InoutCorpus(true);
  const auto m = ResourceUsage(*modern.Find("consumer"), modern);
  const auto l = ResourceUsage(*legacy.Find("consumer"), legacy);
  v.Require(m.count("my_resource") && m.at("my_resource") == ResourceRole::kConsumer,
            "modern role is not consumer");
  v.Require(l.count("my_resource") && l.at("my_resource") == ResourceRole::kBoth,
            "legacy role is not both");
  if (v.pass) v.detail = "modern consumer, legacy both";
  return v;
}

Verdict BudgetRulesCheck() {
  Verdict v;
  auto budget = [](std::vector<std::optional<double>> t, CrashKind kind) {
    return BudgetFromTrials(t, kind, BudgetRules{});
  };
  v.Require(budget({2, 3, 4}, CrashKind::kWarning) == FuzzBudget{10, 3}, "floor");
  v.Require(budget({8, 8, 8}, CrashKind::kWarning) == FuzzBudget{10, 3}, "strict 80%");
  v.Require(budget({6, 6, 24}, CrashKind::kWarning) == FuzzBudget{30, 5}, "escalation");
  v.Require(budget({1, 1, 1}, CrashKind::kMemoryLeak) == FuzzBudget{30, 5}, "memory leak");
  v.Require(!budget({std::nullopt, std::nullopt, std::nullopt}, CrashKind::kWarning), "no finds");
  if (v.pass) v.detail = "floor 10x3, escalation 30x5, leak override 30x5";
  return v;
}

Verdict DelayArithmetic() {
  Verdict v;
  const auto [d1, d2] = ComputeDelays(Day::FromIso("2014-08-08"), Day::FromIso("2020-09-20"),
                                      Day::FromIso("2020-11-16"), SyzbotStart());
  v.Require(d2 == 57, "d2 " + std::to_string(d2));
  v.Require(d1 + d2 == Day::FromIso("2020-11-16") - SyzbotStart(), "fixture conservation");
  Rng rng(7007);
  for (int i = 0; i < 10000 && v.pass; ++i) {
    RetrospectionReport r;
    r.bug_id = "r" + std::to_string(i);
    r.status = ReportStatus::kCompleted;
    r.factor_class = kOutcomeClasses[rng.UniformInt(0, 5)];
    r.guilty_date = Day::FromCivil(2005, 1, 1) + static_cast<int32_t>(rng.UniformInt(0, 6500));
    const Day lower = std::max(r.guilty_date, SyzbotStart());
    r.revealing_date = lower + static_cast<int32_t>(rng.UniformInt(0, 1500));
    r.finding_date = *r.revealing_date + static_cast<int32_t>(rng.UniformInt(0, 500));
    const DelayPair p = ComputeDelayPair(r, SyzbotStart());
    v.Require(p.d1_days + p.d2_days == r.finding_date - lower, "conservation at " + r.bug_id);
  }
  if (v.pass) v.detail = Format("d1=%.0f d2=%.0f, 10000 fixtures conserve", d1, d2);
  return v;
}

bool MatrixConserves(std::span<const DelayPair> pairs) {
  const GuiltyFoundMatrix m = GuiltyVsFound(pairs);
  const YearClassCounts by_year = RevealsByYear(pairs);
  size_t grand = 0;
  for (const auto &[found, row] : m) {
    int column = 0, expected = 0;
    for (const auto &[guilty, n] : row) {
      if (guilty > found) return false;
      column += n;
    }
    for (const auto &[f, n] : by_year.at(found)) expected += n;
    if (column != expected) return false;
    grand += column;
  }
  return grand == pairs.size();
}

Verdict AnalyticsFidelity(std::span<const RetrospectionReport> campaign_reports) {
  Verdict v;
  std::vector<std::string> skipped;
  const auto pairs = CollectDelayPairs(testing::CalibratedReports(), SyzbotStart(), &skipped);
  const auto by_year = RevealsByYear(pairs);
  const int desc2020 = by_year.at(2020).at(FactorClass::kDescriptionCommit);
  const double hidden = HiddenShare(FactorDistribution(pairs)) * 100;
  v.Require(desc2020 == 59, "2020 description count " + std::to_string(desc2020));
  v.Require(std::abs(hidden - 68.16) <= 0.01, Format("hidden %.4f%%", hidden));
  v.Require(MatrixConserves(pairs), "calibrated matrix not conserved");
  const auto campaign = CollectDelayPairs(campaign_reports, SyzbotStart(), &skipped);
  v.Require(MatrixConserves(campaign), "campaign matrix not conserved");
  if (v.pass) {
    v.detail = Format("2020 description %.0f, hidden %.4f%%, matrix conserved on %.0f campaigns",
                      desc2020, hidden, 2);
  }
  return v;
}

Verdict Independence() {
  Verdict v;
  Rng rng(9009);
  int low = 0;
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x, y;
    for (int i = 0; i < 559; ++i) {
      x.push_back(rng.Exponential(331));
      y.push_back(rng.Exponential(74));
    }
    const double r2 = IndependenceCheck(x, y).best_r2;
    worst = std::max(worst, r2);
    low += r2 < 0.126;
  }
  v.Require(low >= 95, Format("%.0f/100 below 0.126", low));
  if (v.pass) v.detail = Format("%.0f/100 below 0.126, max r2 %.4f", low, worst);
  return v;
}

Verdict VmScaling(const SyntheticWorld &world) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> vms = {1, 2, 5, 10, 15, 20, 30, 40};
  const auto curve = EstimateD2VsVms(world, vms, 200, 10);
  const double secs = SecondsSince(start);
  std::map<int, double> at;
  for (const VmPoint &p : curve) at[p.vm_count] = p.mean_d2_days;
  for (size_t i = 1; i < curve.size(); ++i) {
    v.Require(curve[i].mean_d2_days <= curve[i - 1].mean_d2_days,
              "increase at " + std::to_string(curve[i].vm_count));
  }
  const double ratio = at.at(20) / at.at(10);
  v.Require(std::abs(ratio - 0.5) <= 0.1, Format("20/10 ratio %.3f", ratio));
  for (int n : {30, 40}) {
    v.Require(std::abs(at.at(n) / at.at(20) - 1) <= 0.1, "not flat at " + std::to_string(n));
  }
  v.Require(secs < 30, Format("took %.2fs", secs));
  if (v.pass) v.detail = Format("20/10 ratio %.3f, 40/20 %.3f, %.2fs", ratio, at.at(40) / at.at(20), secs);
  return v;
}

Verdict DeterminismAndCache(const SyntheticWorld &world, std::vector<RetrospectionReport> *out) {
  Verdict v;
  const std::string a = Dump(WorldToJson(world.data()));
  const std::string b = Dump(WorldToJson(GenerateWorld(AcceptanceSpec()).data()));
  v.Require(a == b, "worlds differ");
  ProbeCache cache;
  const auto first = RunCampaign(world, world.bugs(), RetrospectOptions{}, &cache, 2);
  const auto fresh = RunCampaign(world, world.bugs(), RetrospectOptions{}, nullptr, 1);
  const auto warm = RunCampaign(world, world.bugs(), RetrospectOptions{}, &cache, 2);
  v.Require(first.failures.empty() && first.reports.size() == fresh.reports.size() &&
                first.reports.size() == warm.reports.size(),
            "campaign failures");
  for (size_t i = 0; v.pass && i < first.reports.size(); ++i) {
    const std::string r = Dump(ReportToJson(first.reports[i], "", 0));
    v.Require(r == Dump(ReportToJson(fresh.reports[i], "", 0)), "report differs across runs");
    v.Require(r == Dump(ReportToJson(warm.reports[i], "", 0)), "warm report differs");
  }
  v.Require(warm.stats.oracle_sessions == 0,
            "warm run made " + std::to_string(warm.stats.oracle_sessions) + " sessions");
  if (v.pass) {
    v.detail = Format("%.0f world bytes identical, cold %.0f sessions, warm %.0f", a.size(),
                      first.stats.oracle_sessions, warm.stats.oracle_sessions);
  }
  *out = first.reports;
  return v;
}

int Main() {
  int failed = 0;
  auto report = [&](int id, const char *name, const std::function<Verdict()> &check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception &e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s C%d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  };
  const SyntheticWorld world = GenerateWorld(AcceptanceSpec());
  std::vector<RetrospectionReport> reports;
  report(1, "bisection-equivalence", BisectionEquivalence);
  report(2, "deterministic-recovery", [&] { return DeterministicRecovery(world); });
  report(3, "probabilistic-robustness", ProbabilisticRobustness);
  report(4, "focusing-correctness", FocusingCorrectness);
  report(5, "legacy-direction", LegacySemantics);
  report(6, "budget-rules", BudgetRulesCheck);
  report(7, "delay-arithmetic", DelayArithmetic);
  report(11, "determinism-and-cache", [&] { return DeterminismAndCache(world, &reports); });
  report(8, "analytics-fidelity", [&] { return AnalyticsFidelity(reports); });
  report(9, "independence", Independence);
  report(10, "vm-scaling", [&] { return VmScaling(world); });
  std::printf("%d/11 criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace retro

int main() { return retro::Main(); }
