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

#ifndef RETRO_HISTORY_H_
#define RETRO_HISTORY_H_

// Commit timelines for the three coordinates of a fuzzing environment: the
// target (kernel) tree, the fuzzer tree, and the description snapshots taken
// from fuzzer commits. Every axis is a linear newest-to-oldest sequence, so
// positions can be bisected directly.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/calendar.h"

namespace retro {

enum class AxisKind { kTarget, kFuzzer, kDescription };
enum class UnstableReason { kBootFailure, kLostConnection, kFuzzerFailure };

std::string_view ToString(AxisKind kind);
AxisKind ParseAxisKind(std::string_view text);
std::string_view ToString(UnstableReason reason);
UnstableReason ParseUnstableReason(std::string_view text);

struct Commit {
  std::string id;
  Day day;
  // Position within `day`; higher is later. Supplied at ingestion because
  // wall-clock timestamps are not monotone in real repositories.
  int day_index = 0;
  // Merge order: the first parent is the branch that was merged into.
  std::vector<std::string> parents;
  std::string message;
  std::vector<std::string> touched_paths;

  bool operator==(const Commit &) const = default;
};

// True if `a` is strictly older than `b` by (day, day_index).
inline bool IsOlder(const Commit &a, const Commit &b) {
  return a.day != b.day ? a.day < b.day : a.day_index < b.day_index;
}

class CommitAxis {
 public:
  CommitAxis() = default;
  // `commits` must be ordered newest to oldest. Throws kValidation on
  // ordering violations, duplicate ids, or marks naming unknown commits.
  CommitAxis(AxisKind kind, std::vector<Commit> commits,
             std::map<std::string, UnstableReason, std::less<>> unstable = {});

  AxisKind kind() const { return kind_; }
  std::span<const Commit> commits() const { return commits_; }
  size_t size() const { return commits_.size(); }
  bool empty() const { return commits_.empty(); }
  const Commit &at(size_t index) const { return commits_.at(index); }
  const Commit &newest() const { return commits_.front(); }
  const Commit &oldest() const { return commits_.back(); }

  std::optional<size_t> IndexOf(std::string_view id) const;
  // Throws kNotFound.
  size_t RequireIndex(std::string_view id) const;
  const Commit &Get(std::string_view id) const {
    return commits_[RequireIndex(id)];
  }
  bool Contains(std::string_view id) const { return IndexOf(id).has_value(); }

  // True if `a` is the same commit as `b` or newer.
  bool AtOrAfter(std::string_view a, std::string_view b) const {
    return RequireIndex(a) <= RequireIndex(b);
  }

  bool IsUnstable(std::string_view id) const {
    return unstable_.find(id) != unstable_.end();
  }
  std::optional<UnstableReason> UnstableReasonFor(std::string_view id) const;
  const std::map<std::string, UnstableReason, std::less<>> &unstable_marks()
      const {
    return unstable_;
  }

 private:
  AxisKind kind_ = AxisKind::kTarget;
  std::vector<Commit> commits_;
  std::map<std::string, size_t, std::less<>> index_;
  std::map<std::string, UnstableReason, std::less<>> unstable_;
};

// Follows first parents from `head` to a root. Throws kNotFound for a
// missing head or dangling parent, kMalformedGraph on a cycle or when the
// path is not strictly ordered by (day, day_index).
CommitAxis LinearizeFirstParent(std::span<const Commit> graph,
                                std::string_view head,
                                AxisKind kind = AxisKind::kTarget);

// Index of the last commit of `day`, or of the nearest earlier day when
// `day` has none. Throws kOutOfRange if `day` precedes the axis.
size_t RepresentativeIndexForDay(const CommitAxis &axis, Day day);
inline const Commit &RepresentativeForDay(const CommitAxis &axis, Day day) {
  return axis.at(RepresentativeIndexForDay(axis, day));
}

// Inclusive newest-to-oldest slice between two commits.
std::span<const Commit> CommitsBetween(const CommitAxis &axis,
                                       std::string_view older,
                                       std::string_view newer);

// Ring search around `start` in the order -1, +1, -2, +2, ... up to
// `max_radius`, returning the closest index for which `is_unstable` is
// false. `start` itself is tried first.
std::optional<size_t> NearestStableIndex(
    size_t axis_size, size_t start, size_t max_radius,
    const std::function<bool(size_t)> &is_unstable);

// Axis form using the unstable marks. Returns nullptr when every commit
// within the radius is marked.
const Commit *NearestStable(const CommitAxis &axis, std::string_view start,
                            size_t max_radius);

// Sub-axis of `source` keeping commits accepted by `keep`, in order.
CommitAxis FilterAxis(const CommitAxis &source, AxisKind kind,
                      const std::function<bool(const Commit &)> &keep);

struct ToolchainRange {
  Day first;
  Day last;  // inclusive
  std::string toolchain;
};

// Date-indexed compiler selection. A day shared by two adjacent ranges
// belongs to the newer one.
class ToolchainTable {
 public:
  // Throws kValidation for unordered, overlapping or gapped ranges.
  explicit ToolchainTable(std::vector<ToolchainRange> entries);

  // Throws kCoverage for a day outside every range.
  const std::string &ForDay(Day day) const;
  std::span<const ToolchainRange> entries() const { return entries_; }

 private:
  std::vector<ToolchainRange> entries_;
};

struct PatchRule {
  AxisKind axis = AxisKind::kTarget;
  std::string older;
  std::string newer;
  std::string patch;
};

// Patches are metadata: resolving them only names which fixes an
// environment would carry.
class PatchRuleTable {
 public:
  PatchRuleTable() = default;
  explicit PatchRuleTable(std::vector<PatchRule> rules)
      : rules_(std::move(rules)) {}

  // Throws kValidation if a rule for `axis.kind()` does not resolve to a
  // contiguous span of `axis`.
  void Validate(const CommitAxis &axis) const;
  std::vector<std::string> PatchesFor(const CommitAxis &axis,
                                      std::string_view commit) const;
  std::span<const PatchRule> rules() const { return rules_; }

 private:
  std::vector<PatchRule> rules_;
};

// Line records `id|date|day_index|parents|touched_paths[|message]`, one
// commit per line; lists are comma separated, blank lines and lines
// starting with '#' are skipped. Throws kParse naming `source` and line.
std::vector<Commit> ParseAxisRecords(std::string_view text,
                                     std::string_view source);
std::string FormatAxisRecords(std::span<const Commit> commits);

}  // namespace retro

#endif  // RETRO_HISTORY_H_
