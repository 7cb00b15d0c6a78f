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

#include "retro/bug.h"

#include <array>
#include <utility>

#include "retro/error.h"

namespace retro {
namespace {

constexpr std::array<std::pair<CrashKind, std::string_view>, 5> kCrashKinds = {{
    {CrashKind::kMemoryLeak, "memory_leak"},
    {CrashKind::kWarning, "warning"},
    {CrashKind::kKasan, "kasan"},
    {CrashKind::kRace, "race"},
    {CrashKind::kOther, "other"},
}};

constexpr std::array<std::pair<FactorClass, std::string_view>, 7> kFactors = {{
    {FactorClass::kDescriptionCommit, "description_commit"},
    {FactorClass::kSyzkallerCommit, "syzkaller_commit"},
    {FactorClass::kKernelCommit, "kernel_commit"},
    {FactorClass::kSanitizerCommit, "sanitizer_commit"},
    {FactorClass::kBlockingBug, "blocking_bug"},
    {FactorClass::kNeverHidden, "never_hidden"},
    {FactorClass::kNeedsManualReview, "needs_manual_review"},
}};

}  // namespace

std::string_view ToString(CrashKind kind) {
  for (const auto &[k, name] : kCrashKinds) {
    if (k == kind) return name;
  }
  return "other";
}

CrashKind ParseCrashKind(std::string_view text) {
  for (const auto &[k, name] : kCrashKinds) {
    if (name == text) return k;
  }
  Fail(ErrorCode::kParse, "unknown crash kind '" + std::string(text) + "'");
}

std::string_view ToString(FactorClass factor) {
  for (const auto &[f, name] : kFactors) {
    if (f == factor) return name;
  }
  return "needs_manual_review";
}

FactorClass ParseFactorClass(std::string_view text) {
  for (const auto &[f, name] : kFactors) {
    if (name == text) return f;
  }
  Fail(ErrorCode::kParse, "unknown factor class '" + std::string(text) + "'");
}

void ValidateBugRecord(const BugRecord &bug) {
  auto fail = [&](const std::string &what) {
    Fail(ErrorCode::kValidation, "bug '" + bug.id + "': " + what);
  };
  if (bug.id.empty()) fail("field 'id' is empty");
  if (bug.finding_commit.empty()) fail("field 'finding_commit' is empty");
  if (bug.guilty_commits.empty()) fail("field 'guilty_commits' is empty");
  if (bug.reproducer_calls.empty()) fail("field 'reproducer_calls' is empty");
  if (bug.guilty_date > bug.finding_date) {
    fail("guilty_date " + bug.guilty_date.ToIso() + " after finding_date " +
         bug.finding_date.ToIso());
  }
  for (const Day &fix : bug.fix_dates) {
    if (fix < bug.finding_date) {
      fail("fix date " + fix.ToIso() + " before finding_date " +
           bug.finding_date.ToIso());
    }
  }
}

std::string DirectoryLabel(std::string_view crash_path) {
  static constexpr std::string_view kLabels[] = {
      "drivers", "fs", "kernel", "net", "mm", "sound", "block", "security"};
  const std::string_view top = crash_path.substr(0, crash_path.find('/'));
  for (std::string_view label : kLabels) {
    if (top == label) return std::string(label);
  }
  return "other";
}

}  // namespace retro
