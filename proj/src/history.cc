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

#include "retro/history.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "retro/error.h"
#include "retro/strings.h"

namespace retro {

std::string_view ToString(AxisKind kind) {
  switch (kind) {
    case AxisKind::kTarget: return "target";
    case AxisKind::kFuzzer: return "fuzzer";
    case AxisKind::kDescription: return "description";
  }
  return "target";
}

AxisKind ParseAxisKind(std::string_view text) {
  if (text == "target") return AxisKind::kTarget;
  if (text == "fuzzer") return AxisKind::kFuzzer;
  if (text == "description") return AxisKind::kDescription;
  Fail(ErrorCode::kParse, "unknown axis kind '" + std::string(text) + "'");
}

std::string_view ToString(UnstableReason reason) {
  switch (reason) {
    case UnstableReason::kBootFailure: return "boot_failure";
    case UnstableReason::kLostConnection: return "lost_connection";
    case UnstableReason::kFuzzerFailure: return "fuzzer_failure";
  }
  return "boot_failure";
}

UnstableReason ParseUnstableReason(std::string_view text) {
  if (text == "boot_failure") return UnstableReason::kBootFailure;
  if (text == "lost_connection") return UnstableReason::kLostConnection;
  if (text == "fuzzer_failure") return UnstableReason::kFuzzerFailure;
  Fail(ErrorCode::kParse,
       "unknown unstable reason '" + std::string(text) + "'");
}

CommitAxis::CommitAxis(AxisKind kind, std::vector<Commit> commits,
                       std::map<std::string, UnstableReason, std::less<>> unstable)
    : kind_(kind), commits_(std::move(commits)), unstable_(std::move(unstable)) {
  for (size_t i = 0; i < commits_.size(); ++i) {
    if (!index_.emplace(commits_[i].id, i).second) {
      Fail(ErrorCode::kValidation,
           "duplicate commit id '" + commits_[i].id + "' on " +
               std::string(ToString(kind_)) + " axis");
    }
    if (i > 0 && !IsOlder(commits_[i], commits_[i - 1])) {
      Fail(ErrorCode::kValidation,
           "commit '" + commits_[i].id + "' is not older than '" +
               commits_[i - 1].id + "' by (date, day index)");
    }
  }
  for (const auto &[id, reason] : unstable_) {
    if (!index_.contains(id)) {
      Fail(ErrorCode::kValidation,
           "unstable mark names unknown commit '" + id + "'");
    }
  }
}

std::optional<size_t> CommitAxis::IndexOf(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t CommitAxis::RequireIndex(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    Fail(ErrorCode::kNotFound, "commit '" + std::string(id) + "' not on " +
                                   std::string(ToString(kind_)) + " axis");
  }
  return it->second;
}

std::optional<UnstableReason> CommitAxis::UnstableReasonFor(
    std::string_view id) const {
  auto it = unstable_.find(id);
  if (it == unstable_.end()) return std::nullopt;
  return it->second;
}

CommitAxis LinearizeFirstParent(std::span<const Commit> graph,
                                std::string_view head, AxisKind kind) {
  std::unordered_map<std::string_view, const Commit *> by_id;
  by_id.reserve(graph.size());
  for (const Commit &c : graph) by_id.emplace(c.id, &c);

  std::vector<Commit> path;
  std::set<std::string_view> seen;
  auto it = by_id.find(head);
  if (it == by_id.end()) {
    Fail(ErrorCode::kNotFound, "head '" + std::string(head) + "' not in graph");
  }
  const Commit *current = it->second;
  while (current != nullptr) {
    if (!seen.insert(current->id).second) {
      Fail(ErrorCode::kMalformedGraph,
           "first-parent cycle through '" + current->id + "'");
    }
    path.push_back(*current);
    if (current->parents.empty()) break;
    auto parent = by_id.find(current->parents.front());
    if (parent == by_id.end()) {
      Fail(ErrorCode::kNotFound, "parent '" + current->parents.front() +
                                     "' of '" + current->id +
                                     "' not in graph");
    }
    current = parent->second;
  }
  try {
    return CommitAxis(kind, std::move(path));
  } catch (const Error &e) {
    Fail(ErrorCode::kMalformedGraph, e.what());
  }
}

size_t RepresentativeIndexForDay(const CommitAxis &axis, Day day) {
  auto commits = axis.commits();
  auto it = std::partition_point(commits.begin(), commits.end(),
                                 [day](const Commit &c) { return c.day > day; });
  if (it == commits.end()) {
    Fail(ErrorCode::kOutOfRange, day.ToIso() + " precedes the " +
                                     std::string(ToString(axis.kind())) +
                                     " axis");
  }
  return static_cast<size_t>(it - commits.begin());
}

std::span<const Commit> CommitsBetween(const CommitAxis &axis,
                                       std::string_view older,
                                       std::string_view newer) {
  const size_t older_index = axis.RequireIndex(older);
  const size_t newer_index = axis.RequireIndex(newer);
  if (newer_index > older_index) {
    Fail(ErrorCode::kArgument, "'" + std::string(older) + "' is newer than '" +
                                   std::string(newer) + "'");
  }
  return axis.commits().subspan(newer_index, older_index - newer_index + 1);
}

std::optional<size_t> NearestStableIndex(
    size_t axis_size, size_t start, size_t max_radius,
    const std::function<bool(size_t)> &is_unstable) {
  if (start >= axis_size) return std::nullopt;
  if (!is_unstable(start)) return start;
  for (size_t r = 1; r <= max_radius; ++r) {
    if (r <= start && !is_unstable(start - r)) return start - r;
    if (start + r < axis_size && !is_unstable(start + r)) return start + r;
    if (r > start && start + r >= axis_size) break;
  }
  return std::nullopt;
}

const Commit *NearestStable(const CommitAxis &axis, std::string_view start,
                            size_t max_radius) {
  const auto index = NearestStableIndex(
      axis.size(), axis.RequireIndex(start), max_radius,
      [&](size_t i) { return axis.IsUnstable(axis.at(i).id); });
  return index ? &axis.at(*index) : nullptr;
}

CommitAxis FilterAxis(const CommitAxis &source, AxisKind kind,
                      const std::function<bool(const Commit &)> &keep) {
  std::vector<Commit> kept;
  std::map<std::string, UnstableReason, std::less<>> marks;
  for (const Commit &c : source.commits()) {
    if (!keep(c)) continue;
    if (auto reason = source.UnstableReasonFor(c.id)) marks.emplace(c.id, *reason);
    kept.push_back(c);
  }
  return CommitAxis(kind, std::move(kept), std::move(marks));
}

ToolchainTable::ToolchainTable(std::vector<ToolchainRange> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    Fail(ErrorCode::kValidation, "toolchain table is empty");
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto &e = entries_[i];
    if (e.last < e.first) {
      Fail(ErrorCode::kValidation,
           "toolchain range for '" + e.toolchain + "' ends before it starts");
    }
    if (i == 0) continue;
    const auto &prev = entries_[i - 1];
    // Adjacent ranges either touch on one shared boundary day or abut.
    if (e.first != prev.last && e.first != prev.last + 1) {
      Fail(ErrorCode::kValidation, "toolchain ranges '" + prev.toolchain +
                                       "' and '" + e.toolchain +
                                       "' overlap or leave a gap");
    }
  }
}

const std::string &ToolchainTable::ForDay(Day day) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first <= day) {
      if (day <= it->last) return it->toolchain;
      break;
    }
  }
  Fail(ErrorCode::kCoverage,
       "no toolchain covers " + day.ToIso());
}

void PatchRuleTable::Validate(const CommitAxis &axis) const {
  for (const PatchRule &rule : rules_) {
    if (rule.axis != axis.kind()) continue;
    const auto older = axis.IndexOf(rule.older);
    const auto newer = axis.IndexOf(rule.newer);
    if (!older || !newer || *newer > *older) {
      Fail(ErrorCode::kValidation,
           "patch '" + rule.patch + "' range " + rule.older + ".." +
               rule.newer + " does not resolve on the " +
               std::string(ToString(axis.kind())) + " axis");
    }
  }
}

std::vector<std::string> PatchRuleTable::PatchesFor(
    const CommitAxis &axis, std::string_view commit) const {
  const size_t index = axis.RequireIndex(commit);
  std::vector<std::string> patches;
  for (const PatchRule &rule : rules_) {
    if (rule.axis != axis.kind()) continue;
    const auto older = axis.IndexOf(rule.older);
    const auto newer = axis.IndexOf(rule.newer);
    if (older && newer && *newer <= index && index <= *older) {
      patches.push_back(rule.patch);
    }
  }
  std::sort(patches.begin(), patches.end());
  return patches;
}

std::vector<Commit> ParseAxisRecords(std::string_view text,
                                     std::string_view source) {
  std::vector<Commit> commits;
  size_t line_no = 0;
  for (const std::string &raw : Split(text, '\n')) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto where = [&] {
      return std::string(source) + ":" + std::to_string(line_no);
    };
    // The optional message field is the remainder of the line and may
    // itself contain '|'.
    std::vector<std::string> fields;
    size_t begin = 0;
    for (int f = 0; f < 5; ++f) {
      const size_t end = line.find('|', begin);
      if (end == std::string_view::npos) {
        fields.emplace_back(line.substr(begin));
        begin = line.size() + 1;
        break;
      }
      fields.emplace_back(line.substr(begin, end - begin));
      begin = end + 1;
    }
    if (fields.size() < 5) {
      Fail(ErrorCode::kParse, where() + ": expected 5 '|' separated fields");
    }
    Commit c;
    c.id = std::string(Trim(fields[0]));
    if (c.id.empty()) Fail(ErrorCode::kParse, where() + ": empty commit id");
    try {
      c.day = Day::FromIso(Trim(fields[1]));
      c.day_index = std::stoi(fields[2]);
    } catch (const std::exception &e) {
      Fail(ErrorCode::kParse, where() + ": " + e.what());
    }
    c.parents = Split(Trim(fields[3]), ',');
    c.touched_paths = Split(Trim(fields[4]), ',');
    if (begin <= line.size()) c.message = std::string(line.substr(begin));
    commits.push_back(std::move(c));
  }
  return commits;
}

std::string FormatAxisRecords(std::span<const Commit> commits) {
  std::string out;
  for (const Commit &c : commits) {
    out += c.id + "|" + c.day.ToIso() + "|" + std::to_string(c.day_index) +
           "|" + Join(c.parents, ",") + "|" + Join(c.touched_paths, ",");
    if (!c.message.empty()) out += "|" + c.message;
    out += "\n";
  }
  return out;
}

}  // namespace retro
