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

#include "retro/synthetic_world.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "retro/error.h"
#include "retro/rng.h"

namespace retro {
namespace {

constexpr int kFirstYear = 2017;
constexpr int kYears = 6;

// Reveals per class by finding year, 2017..2022.
const std::map<FactorClass, std::array<int, kYears>> &RevealsByYear() {
  static const std::map<FactorClass, std::array<int, kYears>> table = {
      {FactorClass::kDescriptionCommit, {5, 23, 21, 59, 15, 4}},
      {FactorClass::kSyzkallerCommit, {6, 15, 12, 12, 9, 1}},
      {FactorClass::kKernelCommit, {1, 28, 22, 25, 21, 21}},
      {FactorClass::kBlockingBug, {3, 11, 21, 20, 11, 13}},
      {FactorClass::kSanitizerCommit, {0, 0, 2, 0, 0, 0}},
      {FactorClass::kNeverHidden, {2, 28, 38, 49, 30, 31}},
  };
  return table;
}

// Bugs by guilty year (rows, from 2005) and finding year (columns).
constexpr int kGuiltyFirstYear = 2005;
constexpr std::array<std::array<int, kYears>, 18> kGuiltyByFound = {{
    {0, 0, 8, 8, 3, 1},   {0, 7, 0, 1, 0, 1},   {0, 2, 2, 0, 0, 0},
    {0, 1, 1, 4, 3, 0},   {0, 0, 3, 1, 4, 1},   {0, 3, 5, 3, 1, 1},
    {0, 0, 2, 3, 2, 1},   {0, 4, 3, 2, 4, 1},   {0, 5, 6, 4, 1, 2},
    {0, 3, 2, 7, 2, 0},   {4, 4, 0, 1, 1, 0},   {3, 11, 5, 8, 2, 2},
    {10, 8, 9, 16, 5, 2}, {0, 57, 17, 17, 3, 1}, {0, 0, 53, 27, 6, 3},
    {0, 0, 0, 63, 18, 4}, {0, 0, 0, 0, 31, 10}, {0, 0, 0, 0, 0, 40},
}};

constexpr std::string_view kPaths[] = {
    "drivers/net/tun.c",         "drivers/usb/core/hub.c",
    "drivers/gpu/drm/drm_ioctl.c", "drivers/block/loop.c",
    "fs/ext4/inode.c",           "fs/io_uring.c",
    "fs/f2fs/super.c",           "kernel/bpf/verifier.c",
    "kernel/sched/core.c",       "net/ipv4/tcp.c",
    "net/bluetooth/hci_core.c",  "net/netfilter/nf_tables_api.c",
    "sound/core/seq/seq_clientmgr.c", "block/blk-core.c",
    "mm/page_alloc.c",           "security/keys/keyctl.c",
    "include/linux/skbuff.h",    "arch/x86/kvm/x86.c",
};

constexpr std::string_view kFuzzerPaths[] = {
    "prog/mutation.go", "prog/generation.go", "pkg/csource/csource.go",
    "syz-manager/manager.go", "executor/common_linux.h", "pkg/report/linux.go",
};

std::string HexId(Rng &rng, std::set<std::string> &used) {
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(rng.Next()));
    if (used.insert(buf).second) return buf;
  }
}

template <typename T>
const T &Pick(Rng &rng, std::span<const T> items) {
  return items[static_cast<size_t>(
      rng.UniformInt(0, static_cast<int64_t>(items.size()) - 1))];
}

int PickWeighted(Rng &rng, std::span<const int> weights) {
  const int total = std::accumulate(weights.begin(), weights.end(), 0);
  if (total <= 0) return -1;
  int64_t draw = rng.UniformInt(0, total - 1);
  for (size_t i = 0; i < weights.size(); ++i) {
    draw -= weights[i];
    if (draw < 0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::string SysText(int revision) {
  std::string out =
      "# common system calls\n"
      "resource fd[int32]: -1\n"
      "\n"
      "open(file ptr[in, filename], flags flags[open_flags, int32], mode "
      "flags[open_mode, int32]) fd\n"
      "close(fd fd)\n"
      "mmap(addr vma, len len[addr, intptr], prot flags[mmap_prot, int32], "
      "flags flags[mmap_flags, int32], fd fd, offset intptr)\n"
      "syz_execute_func(text ptr[in, text[target]])\n"
      "\n"
      "open_flags = 0, 1, 2, 64, 512\n"
      "open_mode = 256, 128\n"
      "mmap_flags = 1, 2, 16, 32\n";
  out += "mmap_prot = 0, 1, 2, 4";
  for (int i = 0; i < revision; ++i) out += ", " + std::to_string(8 << i);
  out += "\n";
  return out;
}

struct BugFileState {
  bool has_mode = true;
  int flag_revision = 0;
  bool has_getter = false;
};

std::string BugText(std::string_view id, const BugFileState &s) {
  const std::string n(id);
  std::string out = "# " + n + " device\n";
  out += "resource fd_" + n + "[fd]\n\n";
  out += "open$" + n + "(file ptr[in, string[\"/dev/" + n +
         "\"]], flags flags[" + n + "_open_flags, int32]) fd_" + n + "\n";
  out += "ioctl$" + n + "(fd fd_" + n + ", cmd const[0xc0de, int32], arg ptr[inout, " +
         n + "_args])\n";
  if (s.has_getter) {
    out += "ioctl$" + n + "_get(fd fd_" + n + ", cmd const[0xc0df, int32], arg " +
           "ptr[out, int32])\n";
  }
  out += "\n" + n + "_args {\n";
  out += "\tsize\tlen[data, int32]\n";
  out += "\tdata\tarray[int8]\n";
  if (s.has_mode) out += "\tmode\tflags[" + n + "_mode, int32]\t(in)\n";
  out += "}\n\n";
  out += n + "_open_flags = 0, 2";
  for (int i = 0; i < s.flag_revision; ++i) out += ", " + std::to_string(1024 << i);
  out += "\n";
  if (s.has_mode) out += n + "_mode = 1, 2, 4\n";
  return out;
}

// First-parent target commits per day, oldest day first.
struct DayIndex {
  Day first;
  std::vector<std::vector<size_t>> by_day;  // axis indexes, newest first

  const std::vector<size_t> &On(Day d) const {
    return by_day.at(static_cast<size_t>(d - first));
  }
};

DayIndex IndexByDay(const CommitAxis &axis, Day first, Day last) {
  DayIndex out;
  out.first = first;
  out.by_day.resize(static_cast<size_t>(last - first) + 1);
  for (size_t i = 0; i < axis.size(); ++i) {
    const Day d = axis.at(i).day;
    if (d < first || d > last) continue;
    out.by_day[static_cast<size_t>(d - first)].push_back(i);
  }
  return out;
}

}  // namespace

std::map<FactorClass, double> WorldSpec::DefaultFactorMix() {
  // Totals over 559 bugs.
  return {
      {FactorClass::kDescriptionCommit, 127.0 / 559},
      {FactorClass::kSyzkallerCommit, 55.0 / 559},
      {FactorClass::kKernelCommit, 118.0 / 559},
      {FactorClass::kBlockingBug, 79.0 / 559},
      {FactorClass::kSanitizerCommit, 2.0 / 559},
      {FactorClass::kNeverHidden, 178.0 / 559},
  };
}

void WorldSpec::Validate() const {
  auto fail = [](const std::string &field, const std::string &why) {
    Fail(ErrorCode::kValidation, "world spec field '" + field + "': " + why);
  };
  if (bugs < 0) fail("bugs", "must be non-negative");
  if (!(target_start < fuzzer_start)) fail("target_start", "must precede fuzzer_start");
  if (fuzzer_start < SyzbotStart()) fail("fuzzer_start", "must not precede 2017-07-22");
  if (end < Day::FromCivil(2023, 1, 31)) fail("end", "must be at least 2023-01-31");
  if (target_start > Day::FromCivil(kGuiltyFirstYear, 1, 1)) {
    fail("target_start", "must not follow 2005-01-01");
  }
  double sum = 0;
  for (const auto &[factor, share] : factor_mix) {
    if (factor == FactorClass::kNeedsManualReview) {
      fail("factor_mix", "needs_manual_review is not a ground-truth class");
    }
    if (share < 0) fail("factor_mix", "negative share");
    sum += share;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail("factor_mix", "shares sum to " + std::to_string(sum) + ", not 1");
  }
  if (!(p_min > 0 && p_min <= p_max && p_max <= 1)) {
    fail("p_min/p_max", "need 0 < p_min <= p_max <= 1");
  }
  if (!(find_minutes_min > 0 && find_minutes_min <= find_minutes_max)) {
    fail("find_minutes_min/max", "need 0 < min <= max");
  }
  if (unstable_density < 0 || unstable_density > 0.2) {
    fail("unstable_density", "must lie in [0, 0.2]");
  }
  if (block_probability <= 0 || block_probability > 1) {
    fail("block_probability", "must lie in (0, 1]");
  }
  if (noise_crash_rate < 0 || noise_crash_rate >= 0.5) {
    fail("noise_crash_rate", "must lie in [0, 0.5)");
  }
  if (memory_leak_fraction < 0 || memory_leak_fraction > 1) {
    fail("memory_leak_fraction", "must lie in [0, 1]");
  }
  if (d2_mean_days <= 0) fail("d2_mean_days", "must be positive");
  if (target_commits_per_day_max < 1) fail("target_commits_per_day_max", "must be >= 1");
  if (fuzzer_commits_per_day <= 0 || fuzzer_commits_per_day > 4) {
    fail("fuzzer_commits_per_day", "must lie in (0, 4]");
  }
  if (merge_fraction < 0 || merge_fraction > 1) fail("merge_fraction", "must lie in [0, 1]");
  if (vm_knee < 1 || reference_vms < 1) fail("vm_knee/reference_vms", "must be >= 1");
  if (description_noise_edits < 0 || sys_edits < 0) {
    fail("description_noise_edits/sys_edits", "must be non-negative");
  }
}

std::map<FactorClass, int> ApportionFactors(
    const std::map<FactorClass, double> &mix, int total) {
  std::map<FactorClass, int> counts;
  std::vector<std::pair<double, FactorClass>> remainders;
  int assigned = 0;
  for (FactorClass f : kOutcomeClasses) {
    auto it = mix.find(f);
    const double exact = it == mix.end() ? 0.0 : it->second * total;
    const int whole = static_cast<int>(std::floor(exact + 1e-9));
    counts[f] = whole;
    assigned += whole;
    remainders.emplace_back(exact - whole, f);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) {
    ++counts[remainders[i].second];
  }
  return counts;
}

SyntheticWorld::SyntheticWorld(WorldData data)
    : data_(std::move(data)), toolchains_(data_.toolchains), patches_(data_.patches) {
  data_.spec.Validate();
  try {
    CommitAxis linear = LinearizeFirstParent(data_.target_graph, data_.target_head);
    std::vector<Commit> commits(linear.commits().begin(), linear.commits().end());
    target_ = CommitAxis(AxisKind::kTarget, std::move(commits), data_.target_unstable);
    fuzzer_ = CommitAxis(AxisKind::kFuzzer, data_.fuzzer_commits, data_.fuzzer_unstable);
  } catch (const Error &e) {
    Fail(ErrorCode::kValidation, std::string("world axes: ") + e.what());
  }
  patches_.Validate(target_);
  patches_.Validate(fuzzer_);
  descriptions_ = std::make_shared<DescriptionHistory>(
      fuzzer_, data_.descriptions, data_.spec.legacy_inout);
  if (data_.bugs.size() != data_.truth.size()) {
    Fail(ErrorCode::kValidation, "world: bug and truth counts differ");
  }
  for (size_t i = 0; i < data_.background.size(); ++i) {
    const BackgroundBug &b = data_.background[i];
    target_.RequireIndex(b.guilty_commit);
    target_.RequireIndex(b.fix_commit);
    background_index_[b.id] = i;
  }
  for (size_t i = 0; i < data_.bugs.size(); ++i) {
    const BugRecord &bug = data_.bugs[i];
    const BugTruth &t = data_.truth[i];
    ValidateBugRecord(bug);
    if (bug.id != t.bug_id) {
      Fail(ErrorCode::kValidation, "world: truth order mismatch at '" + bug.id + "'");
    }
    if (!bug_index_.emplace(bug.id, i).second) {
      Fail(ErrorCode::kValidation, "world: duplicate bug id '" + bug.id + "'");
    }
    target_.RequireIndex(bug.finding_commit);
    for (const auto &g : bug.guilty_commits) target_.RequireIndex(g);
    for (const auto &f : bug.fix_commits) target_.RequireIndex(f);
    const CommitAxis &axis = t.revealing_axis == AxisKind::kTarget ? target_ : fuzzer_;
    if (!axis.Contains(t.revealing_commit)) {
      Fail(ErrorCode::kValidation,
           "world: revealing commit of '" + bug.id + "' not on its axis");
    }
    if (t.blocker && !background_index_.contains(*t.blocker)) {
      Fail(ErrorCode::kValidation,
           "world: blocker '" + *t.blocker + "' of '" + bug.id + "' unknown");
    }
    if (!(t.p > 0 && t.p <= 1)) {
      Fail(ErrorCode::kValidation, "world: p of '" + bug.id + "' outside (0, 1]");
    }
  }
}

const BugTruth &SyntheticWorld::Truth(std::string_view bug_id) const {
  auto it = bug_index_.find(bug_id);
  if (it == bug_index_.end()) {
    Fail(ErrorCode::kNotFound, "unknown bug '" + std::string(bug_id) + "'");
  }
  return data_.truth[it->second];
}

const BugRecord &SyntheticWorld::Bug(std::string_view bug_id) const {
  auto it = bug_index_.find(bug_id);
  if (it == bug_index_.end()) {
    Fail(ErrorCode::kNotFound, "unknown bug '" + std::string(bug_id) + "'");
  }
  return data_.bugs[it->second];
}

std::map<std::string, std::vector<std::string>> SyntheticWorld::FixIndex() const {
  std::map<std::string, std::vector<std::string>> out;
  for (const BugRecord &b : data_.bugs) out[b.id] = b.fix_commits;
  for (const BackgroundBug &b : data_.background) out[b.id].push_back(b.fix_commit);
  return out;
}

bool SyntheticWorld::Findable(const FuzzEnvironment &env,
                              std::string_view bug_id) const {
  const BugTruth &t = Truth(bug_id);
  const BugRecord &bug = Bug(bug_id);
  const size_t target = target_.RequireIndex(env.target_commit);
  const size_t fuzzer = fuzzer_.RequireIndex(env.fuzzer_commit);
  const size_t description = fuzzer_.RequireIndex(env.description_commit);
  // Indexes grow toward older commits.
  for (const auto &g : bug.guilty_commits) {
    if (target > target_.RequireIndex(g)) return false;
  }
  for (const auto &f : bug.fix_commits) {
    if (target <= target_.RequireIndex(f)) return false;
  }
  if (t.blocker) {
    const BackgroundBug &b = data_.background[background_index_.at(*t.blocker)];
    if (target > target_.RequireIndex(b.fix_commit)) return false;
  }
  if (t.factor == FactorClass::kNeverHidden) return true;
  switch (t.revealing_axis) {
    case AxisKind::kTarget:
      return target <= target_.RequireIndex(t.revealing_commit);
    case AxisKind::kFuzzer:
      return fuzzer <= fuzzer_.RequireIndex(t.revealing_commit);
    case AxisKind::kDescription:
      return description <= fuzzer_.RequireIndex(t.revealing_commit);
  }
  return false;
}

SessionOutcome SyntheticWorld::RunSession(const FuzzEnvironment &env,
                                          std::string_view bug_id,
                                          const FuzzBudget &budget,
                                          uint64_t session_seed) const {
  const BugTruth &t = Truth(bug_id);
  Rng rng(SplitMix64(data_.spec.seed) ^ session_seed);
  SessionOutcome out;
  if (target_.IsUnstable(env.target_commit) || fuzzer_.IsUnstable(env.fuzzer_commit) ||
      fuzzer_.IsUnstable(env.description_commit)) {
    out.status = SessionStatus::kUnstable;
    out.unstable_reason = static_cast<UnstableReason>(rng.UniformInt(0, 2));
    return out;
  }
  const bool findable = Findable(env, bug_id);
  bool blocker_active = false;
  std::string blocker_id;
  if (t.blocker) {
    const BackgroundBug &b = data_.background[background_index_.at(*t.blocker)];
    const size_t target = target_.RequireIndex(env.target_commit);
    blocker_active = target <= target_.RequireIndex(b.guilty_commit) &&
                     target > target_.RequireIndex(b.fix_commit);
    blocker_id = b.id;
  }
  out.status = SessionStatus::kNotFound;
  for (int a = 0; a < budget.attempts; ++a) {
    ++out.attempts_run;
    // Draw order is fixed so outcomes depend only on the seed.
    const double block_draw = rng.Uniform();
    const double noise_draw = rng.Uniform();
    const double noise_pick = rng.Uniform();
    const double hit_draw = rng.Uniform();
    const double time_draw = rng.Uniform();
    if (noise_draw < data_.spec.noise_crash_rate && !data_.noise_crashes.empty()) {
      const size_t k = std::min(data_.noise_crashes.size() - 1,
                                static_cast<size_t>(noise_pick *
                                                    data_.noise_crashes.size()));
      out.observed_crashes.push_back(data_.noise_crashes[k]);
    }
    if (blocker_active && block_draw < t.block_probability) {
      out.observed_crashes.push_back(blocker_id);
      continue;
    }
    if (!findable || hit_draw >= t.p) continue;
    const double minutes = data_.spec.random_find_times
                               ? -t.mean_find_minutes * std::log1p(-time_draw)
                               : t.mean_find_minutes;
    if (minutes <= budget.max_time) {
      out.status = SessionStatus::kFound;
      out.time_to_find = minutes;
      break;
    }
  }
  return out;
}

SyntheticWorld GenerateWorld(const WorldSpec &spec) {
  spec.Validate();
  Rng rng(spec.seed);
  std::set<std::string> used_ids;
  WorldData data;
  data.spec = spec;

  // Target DAG: mainline commits every day, some merging short side
  // branches forked from earlier mainline commits.
  std::vector<Commit> &graph = data.target_graph;
  std::vector<size_t> mainline;  // graph indexes, oldest first
  for (Day d = spec.target_start; d <= spec.end; d = d + 1) {
    const int n = static_cast<int>(rng.UniformInt(1, spec.target_commits_per_day_max));
    int day_index = 0;
    for (int j = 0; j < n; ++j) {
      std::vector<std::string> parents;
      if (!mainline.empty()) parents.push_back(graph[mainline.back()].id);
      Commit c;
      c.day = d;
      if (mainline.size() > 12 && rng.Bernoulli(spec.merge_fraction)) {
        const size_t back = static_cast<size_t>(rng.UniformInt(2, 10));
        std::string fork = graph[mainline[mainline.size() - 1 - back]].id;
        const int len = static_cast<int>(rng.UniformInt(1, 2));
        for (int k = 0; k < len; ++k) {
          Commit side;
          side.id = HexId(rng, used_ids);
          side.day = d;
          side.day_index = day_index++;
          side.parents = {fork};
          side.message = "topic: update " + std::string(Pick<std::string_view>(rng, kPaths));
          side.touched_paths = {std::string(Pick<std::string_view>(rng, kPaths))};
          fork = side.id;
          graph.push_back(std::move(side));
        }
        parents.push_back(fork);
        c.message = "Merge branch 'topic'";
      } else {
        c.message = "subsystem: fix " + std::string(Pick<std::string_view>(rng, kPaths));
      }
      c.id = HexId(rng, used_ids);
      c.day_index = day_index++;
      c.parents = std::move(parents);
      c.touched_paths = {std::string(Pick<std::string_view>(rng, kPaths))};
      mainline.push_back(graph.size());
      graph.push_back(std::move(c));
    }
  }
  data.target_head = graph[mainline.back()].id;
  auto graph_pos = [&]() {
    std::map<std::string, size_t, std::less<>> pos;
    for (size_t i = 0; i < graph.size(); ++i) pos.emplace(graph[i].id, i);
    return pos;
  }();
  // Linearized view used while planning; rebuilt by the constructor.
  const CommitAxis target = LinearizeFirstParent(graph, data.target_head);
  const DayIndex target_days = IndexByDay(target, spec.target_start, spec.end);
  auto target_commit = [&](size_t axis_index) -> Commit & {
    return graph[graph_pos.at(target.at(axis_index).id)];
  };

  // Fuzzer axis from the fuzzer start, linear history.
  std::vector<Commit> fuzzer_oldest_first;
  for (Day d = spec.fuzzer_start; d <= spec.end; d = d + 1) {
    int n = 0;
    double budget = spec.fuzzer_commits_per_day;
    while (budget > 0) {
      if (rng.Bernoulli(std::min(1.0, budget))) ++n;
      budget -= 1.0;
    }
    if (d == spec.fuzzer_start) n = std::max(n, 1);
    for (int j = 0; j < n; ++j) {
      Commit c;
      c.id = HexId(rng, used_ids);
      c.day = d;
      c.day_index = j;
      if (!fuzzer_oldest_first.empty()) c.parents = {fuzzer_oldest_first.back().id};
      const std::string path(Pick<std::string_view>(rng, kFuzzerPaths));
      c.message = "fuzzer: improve " + path;
      c.touched_paths = {path};
      fuzzer_oldest_first.push_back(std::move(c));
    }
  }
  std::vector<Commit> &fuzzer = data.fuzzer_commits;
  fuzzer.assign(fuzzer_oldest_first.rbegin(), fuzzer_oldest_first.rend());
  const CommitAxis fuzzer_axis(AxisKind::kFuzzer, fuzzer);
  const size_t fuzzer_oldest = fuzzer.size() - 1;

  // Factor assignment, exact counts, shuffled order.
  std::vector<FactorClass> factors;
  for (const auto &[f, count] : ApportionFactors(spec.factor_mix, spec.bugs)) {
    factors.insert(factors.end(), static_cast<size_t>(count), f);
  }
  std::sort(factors.begin(), factors.end());
  for (size_t i = factors.size(); i > 1; --i) {
    std::swap(factors[i - 1],
              factors[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(i) - 1))]);
  }

  const Day epoch = std::max(SyzbotStart(), spec.fuzzer_start);
  std::set<size_t> reserved_target;  // reveal commits already used
  std::set<size_t> reserved_fuzzer;
  std::map<std::string, std::vector<std::pair<size_t, BugFileState>>> bug_files;

  for (size_t b = 0; b < factors.size(); ++b) {
    const FactorClass factor = factors[b];
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "b%04zu", b + 1);
    const std::string id = idbuf;
    const bool hidden = factor != FactorClass::kNeverHidden;

    Day guilty_day, finding_day, lower_day, reveal_day;
    std::optional<size_t> fuzzer_reveal;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) {
        Fail(ErrorCode::kValidation, "world spec: cannot place bug dates");
      }
      const auto &row = RevealsByYear().at(factor);
      const int fy = PickWeighted(rng, row);
      const int found_year = kFirstYear + (fy < 0 ? 3 : fy);
      std::array<int, kGuiltyByFound.size()> column{};
      for (size_t g = 0; g < kGuiltyByFound.size(); ++g) {
        column[g] = kGuiltyByFound[g][static_cast<size_t>(found_year - kFirstYear)];
      }
      const int gy = kGuiltyFirstYear + PickWeighted(rng, column);
      const Day year_start = std::max(Day::FromCivil(found_year, 1, 1), epoch + 1);
      finding_day = year_start + static_cast<int32_t>(rng.UniformInt(
                                     0, Day::FromCivil(found_year, 12, 31) - year_start));
      const Day gstart = std::max(Day::FromCivil(gy, 1, 1), spec.target_start);
      const Day gend = std::min(Day::FromCivil(gy, 12, 31), finding_day - 1);
      if (gend < gstart) continue;
      guilty_day = gstart + static_cast<int32_t>(rng.UniformInt(0, gend - gstart));
      lower_day = std::max(guilty_day, epoch);
      const int32_t span = finding_day - lower_day;
      if (!hidden) break;
      if (span < 4) continue;
      const int32_t d2 = std::clamp<int32_t>(
          static_cast<int32_t>(std::lround(rng.Exponential(spec.d2_mean_days))), 1,
          span - 2);
      reveal_day = finding_day - d2;
      if (factor == FactorClass::kSyzkallerCommit ||
          factor == FactorClass::kDescriptionCommit) {
        // Latest fuzzer commit on or before the reveal day, after the lower
        // bound day.
        const size_t at = RepresentativeIndexForDay(fuzzer_axis, reveal_day);
        size_t k = at;
        while (k < fuzzer.size() && reserved_fuzzer.contains(k)) ++k;
        if (k >= fuzzer_oldest || fuzzer[k].day <= lower_day) continue;
        fuzzer_reveal = k;
        reveal_day = fuzzer[k].day;
      } else {
        const auto &on = target_days.On(reveal_day);
        bool free = std::any_of(on.begin(), on.end(),
                                [&](size_t i) { return !reserved_target.contains(i); });
        if (!free) continue;
      }
      break;
    }

    const auto &guilty_on = target_days.On(guilty_day);
    const size_t guilty_index = Pick<size_t>(rng, guilty_on);
    const size_t finding_index = target_days.On(finding_day).front();
    const Day fix_day = std::min(
        spec.end, finding_day + static_cast<int32_t>(rng.UniformInt(3, 60)));
    const size_t fix_index = target_days.On(fix_day).front();

    BugRecord bug;
    bug.id = id;
    bug.finding_commit = target.at(finding_index).id;
    bug.finding_date = finding_day;
    bug.guilty_commits = {target.at(guilty_index).id};
    bug.guilty_date = guilty_day;
    bug.fix_commits = {target.at(fix_index).id};
    bug.fix_dates = {fix_day};
    bug.reproducer_calls = {"ioctl$" + id};
    bug.config = "upstream-kasan";
    bug.crash_function = id + "_ioctl";
    bug.crash_path = std::string(Pick<std::string_view>(rng, kPaths));
    const double kind_draw = rng.Uniform();
    if (factor == FactorClass::kSanitizerCommit) {
      bug.crash_kind = CrashKind::kKasan;
    } else if (kind_draw < spec.memory_leak_fraction) {
      bug.crash_kind = CrashKind::kMemoryLeak;
    } else {
      static constexpr CrashKind kOthers[] = {CrashKind::kWarning, CrashKind::kKasan,
                                              CrashKind::kRace, CrashKind::kOther};
      bug.crash_kind = kOthers[rng.UniformInt(0, 3)];
    }
    switch (bug.crash_kind) {
      case CrashKind::kMemoryLeak: bug.sanitizer = "KMEMLEAK"; break;
      case CrashKind::kKasan: bug.sanitizer = "KASAN"; break;
      case CrashKind::kRace: bug.sanitizer = "KCSAN"; break;
      default: break;
    }
    bug.title = std::string(ToString(bug.crash_kind)) + " in " + bug.crash_function;

    BugTruth truth;
    truth.bug_id = id;
    truth.factor = factor;
    truth.p = spec.p_min == spec.p_max ? spec.p_min : rng.Uniform(spec.p_min, spec.p_max);
    truth.mean_find_minutes = rng.Uniform(spec.find_minutes_min, spec.find_minutes_max);

    auto pick_target_on = [&](Day d) {
      std::vector<size_t> free;
      for (size_t i : target_days.On(d)) {
        if (!reserved_target.contains(i) && i != guilty_index) free.push_back(i);
      }
      const size_t i = Pick<size_t>(rng, free);
      reserved_target.insert(i);
      return i;
    };

    bool describe_from_start = true;
    switch (factor) {
      case FactorClass::kNeverHidden: {
        const size_t at = guilty_day < epoch ? target_days.On(epoch).front() : guilty_index;
        truth.revealing_axis = AxisKind::kTarget;
        truth.revealing_commit = target.at(at).id;
        truth.revealing_date = lower_day;
        break;
      }
      case FactorClass::kKernelCommit:
      case FactorClass::kSanitizerCommit:
      case FactorClass::kBlockingBug: {
        const size_t at = pick_target_on(reveal_day);
        truth.revealing_axis = AxisKind::kTarget;
        truth.revealing_commit = target.at(at).id;
        truth.revealing_date = reveal_day;
        if (factor == FactorClass::kSanitizerCommit) {
          Commit &c = target_commit(at);
          c.touched_paths = {"mm/kasan/report.c", "mm/kasan/generic.c"};
          c.message = "kasan: detect out-of-bounds accesses in " + bug.crash_function;
        } else if (factor == FactorClass::kBlockingBug) {
          BackgroundBug blocker;
          blocker.id = "x" + id.substr(1);
          blocker.title = "WARNING in " + id + "_prepare";
          const Day bday = spec.target_start +
                           static_cast<int32_t>(rng.UniformInt(
                               0, std::max<int32_t>(0, (lower_day - 30) - spec.target_start)));
          blocker.guilty_commit = target.at(target_days.On(bday).front()).id;
          blocker.fix_commit = truth.revealing_commit;
          Commit &c = target_commit(at);
          c.message = id + ": fix crash in " + id + "_prepare";
          truth.blocker = blocker.id;
          truth.block_probability = spec.block_probability;
          data.background.push_back(std::move(blocker));
        }
        break;
      }
      case FactorClass::kSyzkallerCommit:
      case FactorClass::kDescriptionCommit: {
        const size_t at = *fuzzer_reveal;
        reserved_fuzzer.insert(at);
        truth.revealing_axis = factor == FactorClass::kSyzkallerCommit
                                   ? AxisKind::kFuzzer
                                   : AxisKind::kDescription;
        truth.revealing_commit = fuzzer[at].id;
        truth.revealing_date = fuzzer[at].day;
        if (factor == FactorClass::kSyzkallerCommit) {
          fuzzer[at].message = "prog: generate " + id + " argument layouts";
        } else {
          describe_from_start = false;
          const bool introduce = rng.Bernoulli(0.5);
          auto &versions = bug_files[id];
          if (!introduce) versions.push_back({fuzzer_oldest, {false, 0, false}});
          versions.push_back({at, {true, 0, false}});
        }
        break;
      }
      case FactorClass::kNeedsManualReview:
        break;
    }
    if (describe_from_start) bug_files[id].push_back({fuzzer_oldest, {true, 0, false}});

    data.bugs.push_back(std::move(bug));
    data.truth.push_back(std::move(truth));
  }

  // Description files. Planned versions fix whether the mode field exists;
  // noise edits after a file appears toggle a getter call (outside every
  // focused set) or extend the open flags (inside).
  for (auto &[id, planned] : bug_files) {
    std::vector<std::pair<size_t, std::optional<bool>>> versions;
    std::set<size_t> taken;
    for (const auto &[at, s] : planned) {
      versions.emplace_back(at, s.has_mode);
      taken.insert(at);
    }
    const size_t first = versions.front().first;
    for (int e = 0; e < spec.description_noise_edits; ++e) {
      const size_t at = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(first)));
      if (taken.insert(at).second) versions.emplace_back(at, std::nullopt);
    }
    std::sort(versions.begin(), versions.end(),
              [](const auto &a, const auto &b) { return a.first > b.first; });
    BugFileState state;
    for (const auto &[at, mode] : versions) {
      if (mode) {
        state.has_mode = *mode;
      } else if (rng.Bernoulli(0.5)) {
        state.has_getter = !state.has_getter;
      } else {
        ++state.flag_revision;
      }
      const std::string path = "sys/linux/" + id + ".txt";
      data.descriptions.push_back({path, fuzzer[at].id, BugText(id, state)});
      fuzzer[at].touched_paths.push_back(path);
    }
  }
  {
    std::set<size_t> taken = {fuzzer_oldest};
    std::vector<size_t> at = {fuzzer_oldest};
    for (int e = 0; e < spec.sys_edits; ++e) {
      const size_t k = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(fuzzer_oldest)));
      if (taken.insert(k).second) at.push_back(k);
    }
    std::sort(at.begin(), at.end(), std::greater<>());
    for (size_t r = 0; r < at.size(); ++r) {
      data.descriptions.push_back(
          {"sys/linux/sys.txt", fuzzer[at[r]].id, SysText(static_cast<int>(r))});
      fuzzer[at[r]].touched_paths.push_back("sys/linux/sys.txt");
    }
  }

  // Unstable windows of one to three commits, kept away from commits that
  // anchor a bug's record or ground truth.
  if (spec.unstable_density > 0) {
    std::set<std::string, std::less<>> protect;
    for (size_t b = 0; b < data.bugs.size(); ++b) {
      const BugRecord &bug = data.bugs[b];
      protect.insert(bug.finding_commit);
      protect.insert(bug.guilty_commits.begin(), bug.guilty_commits.end());
      protect.insert(RepresentativeForDay(fuzzer_axis, bug.finding_date).id);
      protect.insert(data.truth[b].revealing_commit);
    }
    auto mark = [&](const std::vector<std::string> &ids,
                    std::map<std::string, UnstableReason, std::less<>> &marks) {
      const size_t n = ids.size();
      const size_t windows = static_cast<size_t>(
          std::llround(spec.unstable_density * static_cast<double>(n) / 2.0));
      for (size_t w = 0; w < windows; ++w) {
        const size_t start = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(n) - 1));
        const size_t len = static_cast<size_t>(rng.UniformInt(1, 3));
        const auto reason = static_cast<UnstableReason>(rng.UniformInt(0, 2));
        for (size_t k = start; k < std::min(n, start + len); ++k) {
          if (!protect.contains(ids[k])) marks.emplace(ids[k], reason);
        }
      }
    };
    std::vector<std::string> ids;
    for (const Commit &c : target.commits()) ids.push_back(c.id);
    mark(ids, data.target_unstable);
    ids.clear();
    for (const Commit &c : fuzzer) ids.push_back(c.id);
    mark(ids, data.fuzzer_unstable);
  }

  data.toolchains = {
      {spec.target_start, Day::FromCivil(2016, 12, 31), "gcc-4.9"},
      {Day::FromCivil(2017, 1, 1), Day::FromCivil(2018, 12, 31), "gcc-7"},
      {Day::FromCivil(2019, 1, 1), Day::FromCivil(2019, 12, 31), "gcc-8"},
      {Day::FromCivil(2020, 1, 1), Day::FromCivil(2021, 12, 31), "gcc-10"},
      {Day::FromCivil(2022, 1, 1), spec.end, "clang-14"},
  };
  auto first_on_or_after = [&](const CommitAxis &axis, Day d) {
    return axis.at(RepresentativeIndexForDay(axis, d)).id;
  };
  data.patches = {
      {AxisKind::kTarget, first_on_or_after(target, Day::FromCivil(2016, 1, 1)),
       first_on_or_after(target, Day::FromCivil(2018, 10, 28)), "kernel-build-gcc7"},
      {AxisKind::kFuzzer, fuzzer_axis.oldest().id,
       first_on_or_after(fuzzer_axis, Day::FromCivil(2018, 10, 28)),
       "qemu-cpu-migratable-off"},
  };
  for (int i = 0; i < 8; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%02d", i + 1);
    data.noise_crashes.push_back(buf);
  }

  return SyntheticWorld(std::move(data));
}

std::vector<VmPoint> EstimateD2VsVms(const SyntheticWorld &world,
                                     std::span<const int> vm_counts,
                                     int bugs_per_point, uint64_t seed) {
  if (vm_counts.empty()) Fail(ErrorCode::kArgument, "vm study: no VM counts");
  if (bugs_per_point <= 0) Fail(ErrorCode::kArgument, "vm study: no samples");
  for (int v : vm_counts) {
    if (v <= 0) Fail(ErrorCode::kArgument, "vm study: VM count must be positive");
  }
  // Observed exposure at the reference VM count seeds each sample's mean.
  std::vector<double> means;
  for (size_t i = 0; i < world.data().bugs.size(); ++i) {
    const BugTruth &t = world.data().truth[i];
    if (t.factor == FactorClass::kNeverHidden) continue;
    means.push_back(std::max(1, world.data().bugs[i].finding_date - t.revealing_date));
  }
  if (means.empty()) means.push_back(world.spec().d2_mean_days);
  Rng rng(MixSeed(seed, "vm-study"));
  std::vector<double> reference_days(static_cast<size_t>(bugs_per_point));
  for (double &d : reference_days) {
    const double mean = means[static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(means.size()) - 1))];
    d = rng.Exponential(mean);
  }
  const double reference = std::min(world.spec().reference_vms, world.spec().vm_knee);
  std::vector<VmPoint> out;
  for (int v : vm_counts) {
    const double throughput = std::min(v, world.spec().vm_knee);
    double sum = 0;
    for (double d : reference_days) sum += d * reference / throughput;
    out.push_back({v, sum / static_cast<double>(reference_days.size()), bugs_per_point});
  }
  return out;
}

}  // namespace retro
