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

#ifndef RETRO_BUG_H_
#define RETRO_BUG_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retro/calendar.h"

namespace retro {

enum class CrashKind { kMemoryLeak, kWarning, kKasan, kRace, kOther };

enum class FactorClass {
  kDescriptionCommit,
  kSyzkallerCommit,
  kKernelCommit,
  kSanitizerCommit,
  kBlockingBug,
  kNeverHidden,
  kNeedsManualReview,
};

// The six outcome classes in reporting order (manual review excluded).
inline constexpr FactorClass kOutcomeClasses[] = {
    FactorClass::kDescriptionCommit, FactorClass::kSyzkallerCommit,
    FactorClass::kKernelCommit,      FactorClass::kBlockingBug,
    FactorClass::kSanitizerCommit,   FactorClass::kNeverHidden,
};

std::string_view ToString(CrashKind kind);
CrashKind ParseCrashKind(std::string_view text);
std::string_view ToString(FactorClass factor);
FactorClass ParseFactorClass(std::string_view text);

struct BugRecord {
  std::string id;
  std::string title;
  std::string finding_commit;
  Day finding_date;
  // At least one; the oldest defines guilty_date.
  std::vector<std::string> guilty_commits;
  Day guilty_date;
  std::vector<std::string> fix_commits;
  std::vector<Day> fix_dates;
  std::vector<std::string> reproducer_calls;
  CrashKind crash_kind = CrashKind::kOther;
  std::string config;
  std::optional<std::string> duplicate_group;
  // Crash site, used for duplicate suggestions and directory attribution.
  std::string crash_function;
  std::string sanitizer;
  std::string crash_path;

  bool operator==(const BugRecord &) const = default;
};

// Throws kValidation naming the bug and field when dates are out of order
// or required fields are missing.
void ValidateBugRecord(const BugRecord &bug);

// Top-level directory label of a crash path: one of drivers, fs, kernel,
// net, mm, sound, block, security, or other.
std::string DirectoryLabel(std::string_view crash_path);

}  // namespace retro

#endif  // RETRO_BUG_H_
