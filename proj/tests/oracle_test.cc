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

#include <gtest/gtest.h>

#include <cmath>

#include "retro/error.h"
#include "retro/oracle.h"

namespace retro {
namespace {

std::optional<FuzzBudget> Budget(std::vector<std::optional<double>> times,
                                 CrashKind kind = CrashKind::kWarning,
                                 std::vector<std::string> *notes = nullptr) {
  return BudgetFromTrials(times, kind, BudgetRules{}, notes);
}

TEST(BudgetRulesTest, FloorOfTenMinutes) {
  // mean 3 + sigma 0.82 is under the floor.
  const auto b = Budget({2, 3, 4});
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->max_time, 10);
  EXPECT_EQ(b->attempts, 3);
}

TEST(BudgetRulesTest, MeanPlusPopulationSigma) {
  BudgetRules rules;
  rules.escalation_fraction = 2.0;
  std::vector<std::optional<double>> times = {10, 12, 14};
  const auto b = BudgetFromTrials(times, CrashKind::kWarning, rules);
  ASSERT_TRUE(b);
  EXPECT_NEAR(b->max_time, 12 + std::sqrt(8.0 / 3.0), 1e-9);
  EXPECT_EQ(b->attempts, 3);
  // With three trials the slowest always exceeds 80% of mean + sigma, so
  // only the floor keeps the default rules from escalating.
  EXPECT_EQ(Budget({10, 12, 14})->attempts, 5);
}

TEST(BudgetRulesTest, EightyPercentEscalation) {
  // max = 12 + 8.6 = 20.6; the 24-minute trial exceeds 80% of it.
  const auto b = Budget({6, 6, 24});
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->max_time, 30);
  EXPECT_EQ(b->attempts, 5);
}

TEST(BudgetRulesTest, EscalationIsStrict) {
  // Slowest at exactly 80% of the floor does not escalate.
  const auto b = Budget({8, 8, 8});
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->max_time, 10);
  EXPECT_EQ(b->attempts, 3);
  const auto over = Budget({8.5, 8.5, 8.5});
  EXPECT_EQ(over->attempts, 5);
}

TEST(BudgetRulesTest, MemoryLeakAlwaysThirtyTimesFive) {
  const auto b = Budget({1, 1, 1}, CrashKind::kMemoryLeak);
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->max_time, 30);
  EXPECT_EQ(b->attempts, 5);
}

TEST(BudgetRulesTest, NoFindsMeansSkip) {
  EXPECT_FALSE(Budget({std::nullopt, std::nullopt, std::nullopt}));
  EXPECT_FALSE(Budget({std::nullopt, std::nullopt, std::nullopt}, CrashKind::kMemoryLeak));
}

TEST(BudgetRulesTest, UnfoundTrialsCountAsFullTrial) {
  // One find at 2 minutes and two misses at 30: slowest 30 escalates.
  const auto b = Budget({2, std::nullopt, std::nullopt});
  ASSERT_TRUE(b);
  EXPECT_EQ(b->attempts, 5);
}

TEST(BudgetRulesTest, CapAppliesAndIsNoted) {
  BudgetRules rules;
  rules.escalation_fraction = 2.0;
  std::vector<std::string> notes;
  std::vector<std::optional<double>> under = {20, 22, 24};
  EXPECT_NEAR(BudgetFromTrials(under, CrashKind::kKasan, rules, &notes)->max_time,
              22 + std::sqrt(8.0 / 3.0), 1e-9);
  EXPECT_TRUE(notes.empty());
  rules.cap_minutes = 25;
  std::vector<std::optional<double>> slow = {28, 30, std::nullopt};
  const auto capped = BudgetFromTrials(slow, CrashKind::kKasan, rules, &notes);
  ASSERT_TRUE(capped);
  EXPECT_DOUBLE_EQ(capped->max_time, 25);
  EXPECT_EQ(capped->attempts, 3);
  EXPECT_FALSE(notes.empty());
}

class ScriptedOracle : public FuzzOracle {
 public:
  std::vector<std::optional<double>> script;
  mutable size_t calls = 0;
  mutable std::vector<uint64_t> seeds;
  SessionOutcome RunSession(const FuzzEnvironment &, std::string_view, const FuzzBudget &budget,
                            uint64_t seed) const override {
    EXPECT_EQ(budget.attempts, 1);
    EXPECT_DOUBLE_EQ(budget.max_time, 30);
    seeds.push_back(seed);
    SessionOutcome o;
    const auto t = script.at(calls++);
    o.attempts_run = 1;
    if (t) {
      o.status = SessionStatus::kFound;
      o.time_to_find = t;
    } else {
      o.status = SessionStatus::kNotFound;
    }
    return o;
  }
};

TEST(CalibrationTest, ThreeTrialsAtFinding) {
  ScriptedOracle oracle;
  oracle.script = {4, 5, 6};
  const Calibration c = CalibrateBudget(oracle, FuzzEnvironment{}, "b1", CrashKind::kWarning, 7);
  EXPECT_EQ(oracle.calls, 3u);
  ASSERT_TRUE(c.budget);
  EXPECT_DOUBLE_EQ(c.budget->max_time, 10);
  EXPECT_EQ(c.trials.size(), 3u);
  EXPECT_NE(oracle.seeds[0], oracle.seeds[1]);

  ScriptedOracle never;
  never.script = {std::nullopt, std::nullopt, std::nullopt};
  EXPECT_FALSE(CalibrateBudget(never, FuzzEnvironment{}, "b1", CrashKind::kWarning, 7).budget);
}

TEST(SessionStatusTest, Names) {
  for (SessionStatus s : {SessionStatus::kFound, SessionStatus::kNotFound, SessionStatus::kUnstable}) {
    EXPECT_EQ(ParseSessionStatus(ToString(s)), s);
  }
  EXPECT_THROW(ParseSessionStatus("maybe"), Error);
}

}  // namespace
}  // namespace retro
