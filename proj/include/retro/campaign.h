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

#ifndef RETRO_CAMPAIGN_H_
#define RETRO_CAMPAIGN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retro/probe_cache.h"
#include "retro/retrospect.h"
#include "retro/serialization.h"
#include "retro/synthetic_world.h"

namespace retro {

inline constexpr std::string_view kConfigSchema = "retro.config/1";

struct IngestPaths {
  std::string bugs;
  std::string target_axis;
  std::string fuzzer_axis;
  std::string descriptions;
  std::string toolchains;
  std::string patches;
};

struct CampaignConfig {
  // Exactly one input source: a world file, an inline world spec, or
  // real-ingest paths.
  std::optional<std::string> world_path;
  std::optional<WorldSpec> world_spec;
  std::optional<IngestPaths> ingest;
  std::optional<std::string> bugs_path;  // subset of the world's bugs
  Day epoch = SyzbotStart();
  double blocking_threshold = 0.5;
  bool retry = true;
  FuzzBudget retry_budget = {30, 5};
  int vm_count = 2;
  int parallelism = 1;
  std::optional<std::string> cache_path;
  std::string output_dir = "out";
  uint64_t seed = 0;

  // Throws kValidation naming the field.
  void Validate() const;
  RetrospectOptions Options() const;
  // Digest of the fields that affect results; output, cache and
  // parallelism settings are excluded.
  std::string Hash() const;
};

Json ConfigToJson(const CampaignConfig &config);
// Unknown keys are rejected. Throws kValidation naming `source` and the key.
CampaignConfig ConfigFromJson(const Json &j, std::string_view source);

struct BugFailure {
  std::string bug_id;
  std::string message;
};

struct CampaignResult {
  std::vector<RetrospectionReport> reports;  // in bug order
  std::vector<BugFailure> failures;
  RetroStats stats;
};

// Fans the bugs out over `parallelism` workers. A bug that throws is
// recorded in `failures` and does not stop the others.
CampaignResult RunCampaign(const SyntheticWorld &world, std::span<const BugRecord> bugs,
                           const RetrospectOptions &options, ProbeCache *cache,
                           int parallelism);

// Campaign index document: per-status counts and one row per bug.
Json CampaignIndex(const CampaignResult &result, std::string_view config_hash,
                   uint64_t seed);

}  // namespace retro

#endif  // RETRO_CAMPAIGN_H_
