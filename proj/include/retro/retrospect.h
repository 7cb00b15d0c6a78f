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

#ifndef RETRO_RETROSPECT_H_
#define RETRO_RETROSPECT_H_

// Per-bug retrospection: calibrate at the finding environment, probe the
// lower bound, then narrow the reveal along the description, target and
// fuzzer axes in turn.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retro/bug.h"
#include "retro/calendar.h"
#include "retro/history.h"
#include "retro/oracle.h"
#include "retro/syzlang.h"

namespace retro {

class ProbeCache;

struct ProbeResult {
  std::string phase;  // calibration, lower, phase1, confirm1, ...
  std::string tag;    // cache tag: p, r1, c0..c2
  FuzzEnvironment environment;
  FuzzBudget budget;
  SessionOutcome outcome;
  // An identical probe already ran earlier in this retrospection.
  bool cached = false;
  // The description snapshot could not be focused; no session ran.
  bool undescribable = false;

  bool operator==(const ProbeResult &) const = default;
};

enum class ReportStatus {
  kCompleted,
  kSkippedUnreproducible,
  kNeverDescribable,
  kUnstableRange,
};

std::string_view ToString(ReportStatus status);
ReportStatus ParseReportStatus(std::string_view text);

struct BlockingCandidate {
  std::string bug_id;
  double rate = 0;

  bool operator==(const BlockingCandidate &) const = default;
};

struct RetrospectionReport {
  std::string bug_id;
  ReportStatus status = ReportStatus::kCompleted;
  std::string revealing_commit;
  // For unstable ranges: the older bound and the unstable commits between.
  std::optional<std::string> revealing_range_older;
  std::vector<std::string> unstable_commits;
  AxisKind revealing_axis = AxisKind::kTarget;
  FactorClass factor_class = FactorClass::kNeedsManualReview;
  std::optional<Day> revealing_date;
  Day guilty_date;
  Day finding_date;
  std::optional<int> d1_days;
  std::optional<int> d2_days;
  std::optional<FuzzBudget> budget;
  std::string focused_set_hash;
  std::string directory;
  std::vector<ProbeResult> session_log;
  std::vector<BlockingCandidate> blocking_candidates;
  std::vector<std::string> notes;

  bool operator==(const RetrospectionReport &) const = default;
};

struct RetrospectOptions {
  Day epoch = SyzbotStart();
  BudgetRules budget_rules;
  double blocking_threshold = 0.5;
  // Re-probe a boundary failure once with `retry_budget` before accepting.
  bool retry = true;
  FuzzBudget retry_budget = {30, 5};
  int vm_count = 2;
  FocusOptions focus;
  std::vector<std::string> sanitizer_paths = DefaultSanitizerPaths();
  // ECMAScript regex matched case-insensitively against commit messages.
  std::string sanitizer_message_pattern =
      "^(kasan|kmsan|kcsan|kfence|ubsan|kmemleak)(/[a-z0-9_]+)?:";
  uint64_t seed = 0;

  static std::vector<std::string> DefaultSanitizerPaths();
};

struct RetroContext {
  const CommitAxis &target;
  const CommitAxis &fuzzer;
  const SnapshotSource &snapshots;
  const FuzzOracle &oracle;
  ProbeCache *cache = nullptr;
  const ToolchainTable *toolchains = nullptr;
  const PatchRuleTable *patches = nullptr;
  // Bug id -> fix commits, for blocking-bug attribution.
  const std::map<std::string, std::vector<std::string>> *fix_index = nullptr;
};

struct RetroStats {
  int oracle_sessions = 0;
  int cache_hits = 0;
};

struct PreliminaryResult {
  ReportStatus status = ReportStatus::kCompleted;
  std::optional<FuzzBudget> budget;
  FocusedSet focused;
  FuzzEnvironment finding_env;
  std::vector<ProbeResult> trials;
  std::vector<std::string> notes;
};

// Calibrates at (finding commit, same-day fuzzer, its descriptions).
PreliminaryResult Preliminary(const BugRecord &bug, const RetroContext &ctx,
                              const RetrospectOptions &options,
                              RetroStats *stats = nullptr);

// Runs the whole workflow. Probes go through `ctx.cache` when set.
RetrospectionReport RetrospectBug(const BugRecord &bug, const RetroContext &ctx,
                                  const RetrospectOptions &options,
                                  RetroStats *stats = nullptr);

// Foreign crash ids by co-occurrence rate over this bug's not-found
// sessions (repeated and undescribable probes excluded), at or above
// `threshold`, highest first.
std::vector<BlockingCandidate> DetectBlockingCandidates(
    std::span<const ProbeResult> log, std::string_view bug_id, double threshold);

// Class of a target-axis reveal.
FactorClass ClassifyFactor(const Commit &revealing, const BugRecord &bug,
                           std::span<const BlockingCandidate> candidates,
                           const std::map<std::string, std::vector<std::string>> &fix_index,
                           const RetrospectOptions &options);

struct DuplicateGroups {
  // Sorted groups of bug ids sharing fix commits, transitively.
  std::vector<std::vector<std::string>> groups;
  // Pairs agreeing on crash function, kind and sanitizer across groups.
  // Never merged automatically.
  std::vector<std::pair<std::string, std::string>> suggestions;
};

DuplicateGroups GroupDuplicates(std::span<const BugRecord> bugs);

// d1 = revealing - max(guilty, epoch); d2 = finding - revealing. Throws
// kValidation when the dates are out of order.
std::pair<int, int> ComputeDelays(Day guilty, Day revealing, Day finding,
                                  Day epoch = SyzbotStart());

}  // namespace retro

#endif  // RETRO_RETROSPECT_H_
