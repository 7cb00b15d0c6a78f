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

#include "retro/oracle.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retro/error.h"
#include "retro/rng.h"

namespace retro {

std::string_view ToString(SessionStatus status) {
  switch (status) {
    case SessionStatus::kFound: return "found";
    case SessionStatus::kNotFound: return "not_found";
    case SessionStatus::kUnstable: return "unstable";
  }
  return "not_found";
}

SessionStatus ParseSessionStatus(std::string_view text) {
  if (text == "found") return SessionStatus::kFound;
  if (text == "not_found") return SessionStatus::kNotFound;
  if (text == "unstable") return SessionStatus::kUnstable;
  Fail(ErrorCode::kParse, "unknown session status '" + std::string(text) + "'");
}

std::optional<FuzzBudget> BudgetFromTrials(
    std::span<const std::optional<double>> find_times, CrashKind kind,
    const BudgetRules &rules, std::vector<std::string> *diagnostics) {
  std::vector<double> times;
  bool any_found = false;
  for (const auto &t : find_times) {
    any_found |= t.has_value();
    times.push_back(t.value_or(rules.trial_minutes));
  }
  if (!any_found) return std::nullopt;
  if (kind == CrashKind::kMemoryLeak) return rules.escalated;

  double mean = 0;
  for (double t : times) mean += t;
  mean /= static_cast<double>(times.size());
  double var = 0;
  for (double t : times) var += (t - mean) * (t - mean);
  const double sigma = std::sqrt(var / static_cast<double>(times.size()));

  const double raw = mean + sigma;
  double max_time = std::max(raw, rules.floor_minutes);
  if (max_time > rules.cap_minutes) {
    if (diagnostics != nullptr) {
      std::ostringstream msg;
      msg << "max time " << raw << " clamped to " << rules.cap_minutes;
      diagnostics->push_back(msg.str());
    }
    max_time = rules.cap_minutes;
  }
  const double slowest = *std::max_element(times.begin(), times.end());
  if (slowest > rules.escalation_fraction * max_time) return rules.escalated;
  return FuzzBudget{max_time, rules.default_attempts};
}

Calibration CalibrateBudget(const FuzzOracle &oracle, const FuzzEnvironment &env,
                            std::string_view bug_id, CrashKind kind,
                            uint64_t seed, const BudgetRules &rules) {
  Calibration out;
  std::vector<std::optional<double>> times;
  const FuzzBudget trial{rules.trial_minutes, 1};
  for (int i = 0; i < rules.trials; ++i) {
    SessionOutcome o = oracle.RunSession(
        env, bug_id, trial, MixSeed(seed, "calibration/" + std::to_string(i)));
    if (o.status == SessionStatus::kUnstable) {
      out.diagnostics.push_back("calibration trial " + std::to_string(i) +
                                " unstable");
    }
    times.push_back(o.status == SessionStatus::kFound ? o.time_to_find
                                                      : std::nullopt);
    out.trials.push_back(std::move(o));
  }
  out.budget = BudgetFromTrials(times, kind, rules, &out.diagnostics);
  return out;
}

}  // namespace retro
