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

#ifndef RETRO_ORACLE_H_
#define RETRO_ORACLE_H_

// The fuzzing-session contract and the fuzz-budget rules applied to every
// bug before retrospection starts.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/bug.h"
#include "retro/history.h"

namespace retro {

struct FuzzEnvironment {
  std::string target_commit;
  std::string fuzzer_commit;
  // Fuzzer commit whose description snapshot was focused.
  std::string description_commit;
  std::string focused_set_hash;
  std::string toolchain;
  std::string config;
  std::set<std::string> patches;
  bool seeded_reproducer = true;
  int vm_count = 2;

  bool operator==(const FuzzEnvironment &) const = default;
};

struct FuzzBudget {
  double max_time = 30;  // minutes
  int attempts = 3;

  bool operator==(const FuzzBudget &) const = default;
};

enum class SessionStatus { kFound, kNotFound, kUnstable };

std::string_view ToString(SessionStatus status);
SessionStatus ParseSessionStatus(std::string_view text);

struct SessionOutcome {
  SessionStatus status = SessionStatus::kNotFound;
  std::optional<double> time_to_find;  // minutes, iff found
  std::optional<UnstableReason> unstable_reason;
  // Foreign crash ids seen during the session, one entry per attempt.
  std::vector<std::string> observed_crashes;
  int attempts_run = 0;

  bool operator==(const SessionOutcome &) const = default;
};

class FuzzOracle {
 public:
  virtual ~FuzzOracle() = default;
  // Pure given `session_seed`. Throws kNotFound for an unknown bug.
  virtual SessionOutcome RunSession(const FuzzEnvironment &env,
                                    std::string_view bug_id,
                                    const FuzzBudget &budget,
                                    uint64_t session_seed) const = 0;
};

struct BudgetRules {
  int trials = 3;
  double trial_minutes = 30;
  double floor_minutes = 10;
  double cap_minutes = 35;
  double escalation_fraction = 0.8;
  FuzzBudget escalated = {30, 5};
  int default_attempts = 3;
};

// Budget from calibration find times (nullopt = not found within the
// trial). Unfound trials count as the full trial length. Returns nullopt
// when nothing was found.
std::optional<FuzzBudget> BudgetFromTrials(
    std::span<const std::optional<double>> find_times, CrashKind kind,
    const BudgetRules &rules = {}, std::vector<std::string> *diagnostics = nullptr);

struct Calibration {
  std::optional<FuzzBudget> budget;  // nullopt = skip
  std::vector<SessionOutcome> trials;
  std::vector<std::string> diagnostics;
};

// Runs the calibration trials at `env`, one attempt each, with seeds
// derived from `seed`.
Calibration CalibrateBudget(const FuzzOracle &oracle, const FuzzEnvironment &env,
                            std::string_view bug_id, CrashKind kind,
                            uint64_t seed, const BudgetRules &rules = {});

}  // namespace retro

#endif  // RETRO_ORACLE_H_
