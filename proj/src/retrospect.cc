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

#include "retro/retrospect.h"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <set>

#include "retro/bisect.h"
#include "retro/error.h"
#include "retro/probe_cache.h"
#include "retro/rng.h"

namespace retro {
namespace {

// Axis indexes of one environment; the description index is on the
// fuzzer axis.
struct Coord {
  size_t target = 0;
  size_t fuzzer = 0;
  size_t description = 0;
};

size_t Clamp(size_t index, size_t newest, size_t oldest) {
  return std::min(std::max(index, newest), oldest);
}

class Retrospector {
 public:
  Retrospector(const BugRecord &bug, const RetroContext &ctx,
               const RetrospectOptions &options, RetroStats *stats)
      : bug_(bug), ctx_(ctx), options_(options), stats_(stats) {}

  PreliminaryResult RunPreliminary();
  RetrospectionReport Run();

 private:
  struct Boundary {
    size_t success = 0;
    std::optional<size_t> failure;
    bool unstable_range = false;
    std::vector<size_t> unstable;
  };

  const FocusedSet *FocusAt(size_t description);
  ProbeVerdict Probe(const Coord &c, const std::string &phase, const std::string &tag,
                     const FuzzBudget &budget);
  ProbeVerdict ProbeFrozen(const Coord &c, const std::string &phase) {
    return Probe(c, phase, "p", *budget_);
  }
  // A failure is re-probed with the retry budget when retries are on.
  ProbeVerdict ProbeConfirm(const Coord &c, const std::string &phase);
  Boundary BisectWithRetry(size_t n, const std::function<Coord(size_t)> &coord_of,
                           const std::string &phase);
  size_t FuzzerForDay(Day day) const;

  void Complete(FactorClass factor, AxisKind axis, const Commit &commit);
  void CompleteUnstable(AxisKind axis, const std::string &newer,
                        const std::string &older, std::vector<std::string> unstable);
  void Note(std::string text) { report_.notes.push_back(std::move(text)); }

  const BugRecord &bug_;
  const RetroContext &ctx_;
  const RetrospectOptions &options_;
  RetroStats *stats_;
  std::optional<FuzzBudget> budget_;
  std::map<const DescriptionCorpus *, std::optional<FocusedSet>> focus_memo_;
  std::vector<std::shared_ptr<const DescriptionCorpus>> pinned_;
  std::map<std::string, SessionOutcome> memo_;
  std::vector<ProbeResult> log_;
  RetrospectionReport report_;
  Day lower_day_;
  bool toolchain_noted_ = false;
};

const FocusedSet *Retrospector::FocusAt(size_t description) {
  auto snapshot = ctx_.snapshots.SnapshotAt(ctx_.fuzzer.at(description).id);
  if (snapshot == nullptr) return nullptr;
  auto it = focus_memo_.find(snapshot.get());
  if (it == focus_memo_.end()) {
    std::optional<FocusedSet> focused;
    try {
      focused = Focus(*snapshot, bug_.reproducer_calls, options_.focus);
    } catch (const Error &) {
    }
    pinned_.push_back(snapshot);
    it = focus_memo_.emplace(snapshot.get(), std::move(focused)).first;
  }
  return it->second ? &*it->second : nullptr;
}

ProbeVerdict Retrospector::Probe(const Coord &c, const std::string &phase,
                                 const std::string &tag, const FuzzBudget &budget) {
  const Commit &target = ctx_.target.at(c.target);
  const Commit &fuzzer = ctx_.fuzzer.at(c.fuzzer);
  ProbeResult r;
  r.phase = phase;
  r.tag = tag;
  r.budget = budget;
  FuzzEnvironment &env = r.environment;
  env.target_commit = target.id;
  env.fuzzer_commit = fuzzer.id;
  env.description_commit = ctx_.fuzzer.at(c.description).id;
  env.config = bug_.config;
  env.vm_count = options_.vm_count;
  env.seeded_reproducer = true;
  if (ctx_.toolchains != nullptr) {
    try {
      env.toolchain = ctx_.toolchains->ForDay(target.day);
    } catch (const Error &) {
      env.toolchain = "unknown";
      if (!toolchain_noted_) Note("no toolchain covers " + target.day.ToIso());
      toolchain_noted_ = true;
    }
  }
  if (ctx_.patches != nullptr) {
    for (auto &p : ctx_.patches->PatchesFor(ctx_.target, target.id)) env.patches.insert(p);
    for (auto &p : ctx_.patches->PatchesFor(ctx_.fuzzer, fuzzer.id)) env.patches.insert(p);
  }
  const FocusedSet *focused = FocusAt(c.description);
  if (focused == nullptr) {
    r.undescribable = true;
    r.outcome.status = SessionStatus::kNotFound;
    log_.push_back(std::move(r));
    return ProbeVerdict::kFailure;
  }
  env.focused_set_hash = focused->Hash();
  const ProbeKey key{bug_.id, target.id, fuzzer.id, env.focused_set_hash, tag};
  const std::string encoded = key.Encode();
  if (auto it = memo_.find(encoded); it != memo_.end()) {
    r.outcome = it->second;
    r.cached = true;
  } else {
    std::optional<SessionOutcome> stored;
    if (ctx_.cache != nullptr) stored = ctx_.cache->Lookup(key);
    if (stored) {
      r.outcome = *stored;
      if (stats_ != nullptr) ++stats_->cache_hits;
    } else {
      r.outcome = ctx_.oracle.RunSession(env, bug_.id, budget,
                                         MixSeed(options_.seed, encoded));
      if (stats_ != nullptr) ++stats_->oracle_sessions;
      if (ctx_.cache != nullptr) ctx_.cache->Insert(key, r.outcome);
    }
    memo_.emplace(encoded, r.outcome);
  }
  const SessionStatus status = r.outcome.status;
  log_.push_back(std::move(r));
  switch (status) {
    case SessionStatus::kFound: return ProbeVerdict::kSuccess;
    case SessionStatus::kUnstable: return ProbeVerdict::kUnstable;
    case SessionStatus::kNotFound: return ProbeVerdict::kFailure;
  }
  return ProbeVerdict::kFailure;
}

ProbeVerdict Retrospector::ProbeConfirm(const Coord &c, const std::string &phase) {
  ProbeVerdict v = ProbeFrozen(c, phase);
  if (v == ProbeVerdict::kFailure && options_.retry && !log_.back().undescribable) {
    v = Probe(c, phase + "-retry", "r1", options_.retry_budget);
  }
  return v;
}

Retrospector::Boundary Retrospector::BisectWithRetry(
    size_t n, const std::function<Coord(size_t)> &coord_of, const std::string &phase) {
  size_t base = 0;
  for (;;) {
    const BisectResult sub = BisectEarliestSuccess(n - base, [&](size_t i) {
      return ProbeFrozen(coord_of(base + i), phase);
    });
    Boundary out;
    out.success = base + sub.earliest_success;
    if (sub.latest_failure) out.failure = base + *sub.latest_failure;
    out.unstable_range = sub.unstable_range;
    for (size_t u : sub.unstable) out.unstable.push_back(base + u);
    if (out.unstable_range || !out.failure || !options_.retry) return out;
    const Coord f = coord_of(*out.failure);
    if (Probe(f, phase + "-retry", "r1", options_.retry_budget) != ProbeVerdict::kSuccess) {
      return out;
    }
    Note(phase + ": boundary failure found on retry; continuing older");
    base = *out.failure;
  }
}

size_t Retrospector::FuzzerForDay(Day day) const {
  if (day < ctx_.fuzzer.oldest().day) return ctx_.fuzzer.size() - 1;
  return RepresentativeIndexForDay(ctx_.fuzzer, day);
}

void Retrospector::Complete(FactorClass factor, AxisKind axis, const Commit &commit) {
  report_.status = ReportStatus::kCompleted;
  report_.factor_class = factor;
  report_.revealing_axis = axis;
  report_.revealing_commit = commit.id;
  Day date = commit.day;
  if (date < lower_day_) {
    if (factor != FactorClass::kNeverHidden) {
      Note("reveal dated " + date.ToIso() + " before " + lower_day_.ToIso() +
           "; truncated");
    }
    date = lower_day_;
  }
  report_.revealing_date = date;
  try {
    auto [d1, d2] = ComputeDelays(bug_.guilty_date, date, bug_.finding_date,
                                  options_.epoch);
    report_.d1_days = d1;
    report_.d2_days = d2;
  } catch (const Error &e) {
    Note(e.what());
    report_.factor_class = FactorClass::kNeedsManualReview;
  }
}

void Retrospector::CompleteUnstable(AxisKind axis, const std::string &newer,
                                    const std::string &older,
                                    std::vector<std::string> unstable) {
  report_.status = ReportStatus::kUnstableRange;
  report_.revealing_axis = axis;
  report_.revealing_commit = newer;
  report_.revealing_range_older = older;
  report_.unstable_commits = std::move(unstable);
  report_.factor_class = FactorClass::kNeedsManualReview;
}

PreliminaryResult Retrospector::RunPreliminary() {
  PreliminaryResult out;
  auto finding_target = ctx_.target.IndexOf(bug_.finding_commit);
  if (!finding_target) {
    Fail(ErrorCode::kValidation, "bug '" + bug_.id + "': finding commit " +
                                     bug_.finding_commit + " is not on the target axis");
  }
  if (bug_.finding_date < ctx_.fuzzer.oldest().day) {
    Fail(ErrorCode::kValidation, "bug '" + bug_.id + "': finding date " +
                                     bug_.finding_date.ToIso() +
                                     " precedes the fuzzer axis");
  }
  const size_t fz = RepresentativeIndexForDay(ctx_.fuzzer, bug_.finding_date);
  const Coord finding{*finding_target, fz, fz};
  const FocusedSet *focused = FocusAt(fz);
  const Commit &t = ctx_.target.at(finding.target);
  out.finding_env.target_commit = t.id;
  out.finding_env.fuzzer_commit = ctx_.fuzzer.at(fz).id;
  out.finding_env.description_commit = ctx_.fuzzer.at(fz).id;
  if (focused == nullptr) {
    out.status = ReportStatus::kNeverDescribable;
    out.notes.push_back("reproducer cannot be focused at the finding environment");
    return out;
  }
  out.focused = *focused;
  out.finding_env.focused_set_hash = focused->Hash();
  std::vector<std::optional<double>> times;
  const FuzzBudget trial{options_.budget_rules.trial_minutes, 1};
  for (int i = 0; i < options_.budget_rules.trials; ++i) {
    const ProbeVerdict v = Probe(finding, "calibration", "c" + std::to_string(i), trial);
    if (v == ProbeVerdict::kUnstable) {
      out.notes.push_back("calibration trial " + std::to_string(i) + " unstable");
    }
    times.push_back(v == ProbeVerdict::kSuccess ? log_.back().outcome.time_to_find
                                                : std::nullopt);
  }
  out.trials = log_;
  out.budget = BudgetFromTrials(times, bug_.crash_kind, options_.budget_rules, &out.notes);
  if (!out.budget) {
    out.status = ReportStatus::kSkippedUnreproducible;
    out.notes.push_back("not found in any calibration trial");
  }
  return out;
}

RetrospectionReport Retrospector::Run() {
  report_.bug_id = bug_.id;
  report_.guilty_date = bug_.guilty_date;
  report_.finding_date = bug_.finding_date;
  report_.directory = DirectoryLabel(bug_.crash_path);
  lower_day_ = std::max(bug_.guilty_date, options_.epoch);

  PreliminaryResult pre = RunPreliminary();
  report_.focused_set_hash = pre.finding_env.focused_set_hash;
  for (auto &n : pre.notes) Note(std::move(n));
  auto finish = [&]() {
    report_.session_log = log_;
    report_.blocking_candidates =
        DetectBlockingCandidates(log_, bug_.id, options_.blocking_threshold);
    return std::move(report_);
  };
  if (pre.status != ReportStatus::kCompleted) {
    report_.status = pre.status;
    return finish();
  }
  budget_ = pre.budget;
  report_.budget = budget_;

  const size_t finding_t = ctx_.target.RequireIndex(bug_.finding_commit);
  const size_t finding_fz = RepresentativeIndexForDay(ctx_.fuzzer, bug_.finding_date);

  // Lower bound: the guilty commit, or the epoch when the bug is older.
  std::optional<size_t> guilty;
  for (const auto &g : bug_.guilty_commits) {
    if (auto i = ctx_.target.IndexOf(g); i && (!guilty || *i > *guilty)) guilty = i;
  }
  if (!guilty) {
    Note("guilty commit not on the target axis; using the guilty day");
    guilty = RepresentativeIndexForDay(ctx_.target, bug_.guilty_date);
  }
  size_t lower_t = bug_.guilty_date >= options_.epoch
                       ? *guilty
                       : RepresentativeIndexForDay(ctx_.target, options_.epoch);
  if (lower_t < finding_t) {
    Note("lower bound newer than the finding commit");
    lower_t = finding_t;
  }
  const size_t lower_fz = std::max(FuzzerForDay(lower_day_), finding_fz);
  const Coord lower{lower_t, lower_fz, lower_fz};
  const ProbeVerdict lv = ProbeFrozen(lower, "lower");
  if (lv == ProbeVerdict::kSuccess) {
    Complete(FactorClass::kNeverHidden, AxisKind::kTarget, ctx_.target.at(lower_t));
    return finish();
  }
  if (lv == ProbeVerdict::kUnstable) Note("lower bound unstable; treated as not found");

  // Phase 1: relevant description commits, each with same-day target and
  // fuzzer commits. The finding environment anchors the newest end and
  // the lower bound the oldest.
  CommitAxis descriptions;
  try {
    descriptions = RelevantDescriptionCommits(ctx_.fuzzer, ctx_.snapshots,
                                              bug_.reproducer_calls, options_.focus);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kNeverDescribable) throw;
    report_.status = ReportStatus::kNeverDescribable;
    Note(e.what());
    return finish();
  }
  std::vector<Coord> cands = {{finding_t, finding_fz, finding_fz}};
  for (const Commit &d : descriptions.commits()) {
    const size_t k = ctx_.fuzzer.RequireIndex(d.id);
    if (k <= finding_fz || k >= lower_fz) continue;
    cands.push_back({Clamp(RepresentativeIndexForDay(ctx_.target, d.day), finding_t, lower_t),
                     Clamp(FuzzerForDay(d.day), finding_fz, lower_fz), k});
  }
  cands.push_back(lower);
  const Boundary b1 = BisectWithRetry(
      cands.size(), [&](size_t i) { return cands[i]; }, "phase1");
  if (b1.unstable_range) {
    std::vector<std::string> ids;
    for (size_t u : b1.unstable) ids.push_back(ctx_.fuzzer.at(cands[u].description).id);
    CompleteUnstable(AxisKind::kDescription,
                     ctx_.fuzzer.at(cands[b1.success].description).id,
                     ctx_.fuzzer.at(cands[b1.failure.value_or(cands.size() - 1)].description).id,
                     std::move(ids));
    return finish();
  }
  if (!b1.failure) {
    Note("lower bound found on retry");
    Complete(FactorClass::kNeverHidden, AxisKind::kTarget, ctx_.target.at(lower_t));
    return finish();
  }
  const Coord s1 = cands[b1.success];
  const Coord f1 = cands[*b1.failure];
  const ProbeVerdict c1 = ProbeConfirm({s1.target, s1.fuzzer, f1.description}, "confirm1");
  if (c1 == ProbeVerdict::kFailure) {
    if (b1.success == 0) {
      // The anchor's snapshot is not itself a relevant commit; name the
      // relevant commit it inherits from.
      const Commit *reveal = nullptr;
      for (const Commit &d : descriptions.commits()) {
        const size_t k = ctx_.fuzzer.RequireIndex(d.id);
        if (k >= finding_fz && k < lower_fz) {
          reveal = &ctx_.fuzzer.at(k);
          break;
        }
      }
      if (reveal == nullptr) {
        Note("description reveal at the finding snapshot has no relevant commit");
        Complete(FactorClass::kNeedsManualReview, AxisKind::kDescription,
                 ctx_.fuzzer.at(finding_fz));
      } else {
        Complete(FactorClass::kDescriptionCommit, AxisKind::kDescription, *reveal);
      }
    } else {
      Complete(FactorClass::kDescriptionCommit, AxisKind::kDescription,
               ctx_.fuzzer.at(s1.description));
    }
    return finish();
  }
  if (c1 == ProbeVerdict::kUnstable) Note("confirm1 unstable; assuming not a description reveal");

  // Phase 2: target commits between the two Phase 1 environments, with
  // same-day fuzzer commits and the succeeding description snapshot.
  const size_t desc = s1.description;
  const size_t t_hi = s1.target;
  const size_t t_lo = f1.target;
  auto coord2 = [&](size_t j) -> Coord {
    if (j == 0) return s1;
    const size_t t = t_hi + j;
    return {t, Clamp(FuzzerForDay(ctx_.target.at(t).day), s1.fuzzer, f1.fuzzer), desc};
  };
  Coord ts = s1;
  Coord tf{t_lo, f1.fuzzer, desc};
  if (t_lo > t_hi) {
    const Boundary b2 = BisectWithRetry(t_lo - t_hi + 1, coord2, "phase2");
    if (b2.unstable_range) {
      std::vector<std::string> ids;
      for (size_t u : b2.unstable) ids.push_back(ctx_.target.at(coord2(u).target).id);
      CompleteUnstable(AxisKind::kTarget, ctx_.target.at(coord2(b2.success).target).id,
                       ctx_.target.at(coord2(b2.failure.value_or(t_lo - t_hi)).target).id,
                       std::move(ids));
      return finish();
    }
    if (!b2.failure) {
      Note("phase2: no failing target commit between the phase 1 environments");
      Complete(FactorClass::kNeedsManualReview, AxisKind::kTarget,
               ctx_.target.at(coord2(b2.success).target));
      return finish();
    }
    ts = coord2(b2.success);
    tf = coord2(*b2.failure);
  }
  const ProbeVerdict c2 =
      ts.fuzzer == tf.fuzzer ? ProbeVerdict::kFailure
                             : ProbeConfirm({tf.target, ts.fuzzer, desc}, "confirm2");
  if (c2 == ProbeVerdict::kUnstable) {
    Note("confirm2 unstable");
    Complete(FactorClass::kNeedsManualReview, AxisKind::kTarget, ctx_.target.at(ts.target));
    return finish();
  }
  if (c2 == ProbeVerdict::kFailure) {
    if (ts.target == tf.target) {
      Note("phase2: succeeding and failing environments share a target commit");
      Complete(FactorClass::kNeedsManualReview, AxisKind::kTarget, ctx_.target.at(ts.target));
      return finish();
    }
    const Commit &reveal = ctx_.target.at(ts.target);
    static const std::map<std::string, std::vector<std::string>> kNoFixes;
    const auto candidates = DetectBlockingCandidates(log_, bug_.id, options_.blocking_threshold);
    Complete(ClassifyFactor(reveal, bug_, candidates,
                            ctx_.fix_index ? *ctx_.fix_index : kNoFixes, options_),
             AxisKind::kTarget, reveal);
    return finish();
  }

  // Phase 3: fuzzer commits between the two, newest first, on the older
  // target commit.
  if (ts.fuzzer >= tf.fuzzer) {
    Note("phase3: no fuzzer commits to scan");
    Complete(FactorClass::kNeedsManualReview, AxisKind::kFuzzer, ctx_.fuzzer.at(ts.fuzzer));
    return finish();
  }
  size_t last_success = ts.fuzzer;
  std::vector<std::string> unstable;
  for (size_t k = ts.fuzzer + 1; k <= tf.fuzzer; ++k) {
    const Coord c{tf.target, k, desc};
    ProbeVerdict v = ProbeFrozen(c, "phase3");
    if (v == ProbeVerdict::kFailure && options_.retry) {
      v = Probe(c, "phase3-retry", "r1", options_.retry_budget);
    }
    if (v == ProbeVerdict::kUnstable) {
      unstable.push_back(ctx_.fuzzer.at(k).id);
      continue;
    }
    if (v == ProbeVerdict::kSuccess) {
      last_success = k;
      unstable.clear();
      continue;
    }
    if (!unstable.empty()) {
      CompleteUnstable(AxisKind::kFuzzer, ctx_.fuzzer.at(last_success).id,
                       ctx_.fuzzer.at(k).id, std::move(unstable));
      return finish();
    }
    Complete(FactorClass::kSyzkallerCommit, AxisKind::kFuzzer, ctx_.fuzzer.at(last_success));
    return finish();
  }
  Note("phase3: no failing fuzzer commit");
  Complete(FactorClass::kNeedsManualReview, AxisKind::kFuzzer, ctx_.fuzzer.at(last_success));
  return finish();
}

}  // namespace

std::string_view ToString(ReportStatus status) {
  switch (status) {
    case ReportStatus::kCompleted: return "completed";
    case ReportStatus::kSkippedUnreproducible: return "skipped_unreproducible";
    case ReportStatus::kNeverDescribable: return "never_describable";
    case ReportStatus::kUnstableRange: return "unstable_range";
  }
  return "completed";
}

ReportStatus ParseReportStatus(std::string_view text) {
  for (ReportStatus s : {ReportStatus::kCompleted, ReportStatus::kSkippedUnreproducible,
                         ReportStatus::kNeverDescribable, ReportStatus::kUnstableRange}) {
    if (ToString(s) == text) return s;
  }
  Fail(ErrorCode::kParse, "unknown report status '" + std::string(text) + "'");
}

std::vector<std::string> RetrospectOptions::DefaultSanitizerPaths() {
  return {"mm/kasan/", "mm/kmsan/", "kernel/kcsan/", "mm/kfence/",
          "lib/ubsan.c", "mm/kmemleak.c"};
}

PreliminaryResult Preliminary(const BugRecord &bug, const RetroContext &ctx,
                              const RetrospectOptions &options, RetroStats *stats) {
  Retrospector r(bug, ctx, options, stats);
  return r.RunPreliminary();
}

RetrospectionReport RetrospectBug(const BugRecord &bug, const RetroContext &ctx,
                                  const RetrospectOptions &options, RetroStats *stats) {
  Retrospector r(bug, ctx, options, stats);
  return r.Run();
}

std::vector<BlockingCandidate> DetectBlockingCandidates(
    std::span<const ProbeResult> log, std::string_view bug_id, double threshold) {
  std::map<std::string, int> counts;
  int sessions = 0;
  for (const ProbeResult &p : log) {
    if (p.cached || p.undescribable || p.outcome.status != SessionStatus::kNotFound) {
      continue;
    }
    ++sessions;
    std::set<std::string> seen(p.outcome.observed_crashes.begin(),
                               p.outcome.observed_crashes.end());
    for (const std::string &id : seen) {
      if (id != bug_id) ++counts[id];
    }
  }
  std::vector<BlockingCandidate> out;
  if (sessions == 0) return out;
  for (const auto &[id, n] : counts) {
    const double rate = static_cast<double>(n) / sessions;
    if (rate >= threshold) out.push_back({id, rate});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &a, const auto &b) { return a.rate > b.rate; });
  return out;
}

FactorClass ClassifyFactor(const Commit &revealing, const BugRecord &bug,
                           std::span<const BlockingCandidate> candidates,
                           const std::map<std::string, std::vector<std::string>> &fix_index,
                           const RetrospectOptions &options) {
  if (std::find(bug.guilty_commits.begin(), bug.guilty_commits.end(), revealing.id) !=
      bug.guilty_commits.end()) {
    return FactorClass::kNeverHidden;
  }
  bool sanitizer = false;
  for (const std::string &path : revealing.touched_paths) {
    for (const std::string &prefix : options.sanitizer_paths) {
      if (path.rfind(prefix, 0) == 0) sanitizer = true;
    }
  }
  if (!sanitizer && !options.sanitizer_message_pattern.empty()) {
    const std::regex pattern(options.sanitizer_message_pattern,
                             std::regex::ECMAScript | std::regex::icase);
    sanitizer = std::regex_search(revealing.message, pattern);
  }
  bool blocking = false;
  for (const BlockingCandidate &c : candidates) {
    auto it = fix_index.find(c.bug_id);
    if (it == fix_index.end()) continue;
    if (std::find(it->second.begin(), it->second.end(), revealing.id) != it->second.end()) {
      blocking = true;
    }
  }
  if (sanitizer && blocking) return FactorClass::kNeedsManualReview;
  if (sanitizer) return FactorClass::kSanitizerCommit;
  if (blocking) return FactorClass::kBlockingBug;
  return FactorClass::kKernelCommit;
}

DuplicateGroups GroupDuplicates(std::span<const BugRecord> bugs) {
  std::vector<size_t> parent(bugs.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, size_t> by_fix;
  for (size_t i = 0; i < bugs.size(); ++i) {
    for (const std::string &fix : bugs[i].fix_commits) {
      auto [it, inserted] = by_fix.emplace(fix, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }
  std::map<size_t, std::vector<std::string>> groups;
  for (size_t i = 0; i < bugs.size(); ++i) groups[find(i)].push_back(bugs[i].id);
  DuplicateGroups out;
  for (auto &[root, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    out.groups.push_back(std::move(ids));
  }
  std::sort(out.groups.begin(), out.groups.end());
  for (size_t i = 0; i < bugs.size(); ++i) {
    for (size_t j = i + 1; j < bugs.size(); ++j) {
      const BugRecord &a = bugs[i];
      const BugRecord &b = bugs[j];
      if (find(i) == find(j) || a.crash_function.empty()) continue;
      if (a.crash_function == b.crash_function && a.crash_kind == b.crash_kind &&
          a.sanitizer == b.sanitizer) {
        out.suggestions.emplace_back(std::min(a.id, b.id), std::max(a.id, b.id));
      }
    }
  }
  std::sort(out.suggestions.begin(), out.suggestions.end());
  return out;
}

std::pair<int, int> ComputeDelays(Day guilty, Day revealing, Day finding, Day epoch) {
  const Day start = std::max(guilty, epoch);
  if (revealing < start) {
    Fail(ErrorCode::kValidation, "revealing date " + revealing.ToIso() +
                                     " precedes " + start.ToIso());
  }
  if (finding < revealing) {
    Fail(ErrorCode::kValidation, "finding date " + finding.ToIso() +
                                     " precedes revealing date " + revealing.ToIso());
  }
  return {revealing - start, finding - revealing};
}

}  // namespace retro
