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

#ifndef RETRO_SYNTHETIC_WORLD_H_
#define RETRO_SYNTHETIC_WORLD_H_

// A generated fuzzing world with known ground truth. It plays the role of
// the real build/boot/fuzz loop: sessions are decided by comparing the
// environment against each bug's revealing condition.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/bug.h"
#include "retro/calendar.h"
#include "retro/description_history.h"
#include "retro/history.h"
#include "retro/oracle.h"

namespace retro {

struct WorldSpec {
  uint64_t seed = 1;
  Day target_start = Day::FromCivil(2005, 1, 1);
  Day fuzzer_start = SyzbotStart();
  Day end = Day::FromCivil(2023, 3, 31);
  int bugs = 200;
  // Share of bugs per outcome class; apportioned exactly.
  std::map<FactorClass, double> factor_mix = DefaultFactorMix();
  // Per-attempt success probability, uniform in [p_min, p_max].
  double p_min = 1.0;
  double p_max = 1.0;
  // Mean minutes to find once findable, uniform per bug.
  double find_minutes_min = 2.0;
  double find_minutes_max = 8.0;
  // Exponential find times when true, otherwise exactly the mean.
  bool random_find_times = false;
  double memory_leak_fraction = 0.1;
  // Fraction of target and fuzzer commits inside unstable windows.
  double unstable_density = 0.0;
  double block_probability = 0.9;
  double noise_crash_rate = 0.02;
  double d2_mean_days = 74.0;
  double merge_fraction = 0.3;
  int target_commits_per_day_max = 3;
  double fuzzer_commits_per_day = 0.8;
  int description_noise_edits = 3;
  int sys_edits = 12;
  bool legacy_inout = false;
  int vm_knee = 20;
  int reference_vms = 10;

  static std::map<FactorClass, double> DefaultFactorMix();
  // Throws kValidation naming the offending field.
  void Validate() const;
};

// Exact per-class counts for `total` bugs by largest remainder.
std::map<FactorClass, int> ApportionFactors(
    const std::map<FactorClass, double> &mix, int total);

struct BugTruth {
  std::string bug_id;
  FactorClass factor = FactorClass::kNeverHidden;
  AxisKind revealing_axis = AxisKind::kTarget;
  std::string revealing_commit;
  Day revealing_date;
  double p = 1.0;
  double mean_find_minutes = 5.0;
  std::optional<std::string> blocker;
  double block_probability = 0.0;

  bool operator==(const BugTruth &) const = default;
};

// Bugs outside the campaign that block campaign bugs.
struct BackgroundBug {
  std::string id;
  std::string title;
  std::string guilty_commit;
  std::string fix_commit;

  bool operator==(const BackgroundBug &) const = default;
};

struct WorldData {
  WorldSpec spec;
  // Full target DAG and its head; the target axis is its first-parent
  // linearization.
  std::vector<Commit> target_graph;
  std::string target_head;
  std::vector<Commit> fuzzer_commits;  // newest first
  std::map<std::string, UnstableReason, std::less<>> target_unstable;
  std::map<std::string, UnstableReason, std::less<>> fuzzer_unstable;
  std::vector<FileVersion> descriptions;
  std::vector<BugRecord> bugs;
  std::vector<BugTruth> truth;
  std::vector<BackgroundBug> background;
  std::vector<ToolchainRange> toolchains;
  std::vector<PatchRule> patches;
  std::vector<std::string> noise_crashes;
};

class SyntheticWorld : public FuzzOracle {
 public:
  // Validates the data and builds the axes. Throws kValidation.
  explicit SyntheticWorld(WorldData data);

  const WorldData &data() const { return data_; }
  const WorldSpec &spec() const { return data_.spec; }
  const CommitAxis &target_axis() const { return target_; }
  const CommitAxis &fuzzer_axis() const { return fuzzer_; }
  const DescriptionHistory &descriptions() const { return *descriptions_; }
  const ToolchainTable &toolchains() const { return toolchains_; }
  const PatchRuleTable &patches() const { return patches_; }
  std::span<const BugRecord> bugs() const { return data_.bugs; }
  // Throws kNotFound.
  const BugTruth &Truth(std::string_view bug_id) const;
  const BugRecord &Bug(std::string_view bug_id) const;
  // Bug id (campaign or background) -> fix commits.
  std::map<std::string, std::vector<std::string>> FixIndex() const;

  // Ground-truth findability, ignoring p and stability.
  bool Findable(const FuzzEnvironment &env, std::string_view bug_id) const;

  SessionOutcome RunSession(const FuzzEnvironment &env, std::string_view bug_id,
                            const FuzzBudget &budget,
                            uint64_t session_seed) const override;

 private:
  WorldData data_;
  CommitAxis target_;
  CommitAxis fuzzer_;
  std::shared_ptr<DescriptionHistory> descriptions_;
  ToolchainTable toolchains_;
  PatchRuleTable patches_;
  std::map<std::string, size_t, std::less<>> bug_index_;
  std::map<std::string, size_t, std::less<>> background_index_;
};

// Deterministic for a fixed spec (including its seed).
SyntheticWorld GenerateWorld(const WorldSpec &spec);

struct VmPoint {
  int vm_count = 0;
  double mean_d2_days = 0;
  int samples = 0;
};

// Mean simulated days-to-find per VM count. Fuzzing throughput scales
// linearly with VMs up to the knee and stays flat beyond it. Every VM count
// reuses the same per-sample random draws. Throws kArgument for an empty
// list or a non-positive count.
std::vector<VmPoint> EstimateD2VsVms(const SyntheticWorld &world,
                                     std::span<const int> vm_counts,
                                     int bugs_per_point, uint64_t seed);

}  // namespace retro

#endif  // RETRO_SYNTHETIC_WORLD_H_
