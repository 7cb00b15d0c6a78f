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

#include "retro/campaign.h"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <set>
#include <thread>

#include "retro/error.h"
#include "retro/rng.h"

namespace retro {
namespace {

const std::set<std::string> &ConfigKeys() {
  static const std::set<std::string> keys = {
      "schema", "world", "world_spec", "ingest", "bugs", "epoch",
      "blocking_threshold", "retry", "retry_budget", "vm_count", "parallelism",
      "cache", "output", "seed"};
  return keys;
}

const std::set<std::string> &IngestKeys() {
  static const std::set<std::string> keys = {"bugs", "target_axis", "fuzzer_axis",
                                             "descriptions", "toolchains", "patches"};
  return keys;
}

void RejectUnknown(const Json &j, const std::set<std::string> &known, std::string_view where) {
  for (const auto &[key, unused] : j.items()) {
    if (!known.count(key)) {
      Fail(ErrorCode::kValidation, std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

void CampaignConfig::Validate() const {
  const int sources = world_path.has_value() + world_spec.has_value() + ingest.has_value();
  if (sources != 1) {
    Fail(ErrorCode::kValidation,
         "config: exactly one of 'world', 'world_spec' or 'ingest' is required");
  }
  if (parallelism < 1) Fail(ErrorCode::kValidation, "config field 'parallelism': must be >= 1");
  if (vm_count < 1) Fail(ErrorCode::kValidation, "config field 'vm_count': must be >= 1");
  if (blocking_threshold <= 0 || blocking_threshold > 1) {
    Fail(ErrorCode::kValidation, "config field 'blocking_threshold': must be in (0, 1]");
  }
  if (retry_budget.max_time <= 0 || retry_budget.attempts < 1) {
    Fail(ErrorCode::kValidation, "config field 'retry_budget': must be positive");
  }
  if (output_dir.empty()) Fail(ErrorCode::kValidation, "config field 'output': empty");
  if (world_spec) world_spec->Validate();
}

RetrospectOptions CampaignConfig::Options() const {
  RetrospectOptions o;
  o.epoch = epoch;
  o.blocking_threshold = blocking_threshold;
  o.retry = retry;
  o.retry_budget = retry_budget;
  o.vm_count = vm_count;
  o.seed = seed;
  return o;
}

std::string CampaignConfig::Hash() const {
  Json j = ConfigToJson(*this);
  j.erase("output");
  j.erase("cache");
  j.erase("parallelism");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a(j.dump())));
  return buf;
}

Json ConfigToJson(const CampaignConfig &c) {
  Json j = {{"schema", kConfigSchema},
            {"epoch", c.epoch},
            {"blocking_threshold", c.blocking_threshold},
            {"retry", c.retry},
            {"retry_budget", c.retry_budget},
            {"vm_count", c.vm_count},
            {"parallelism", c.parallelism},
            {"output", c.output_dir},
            {"seed", c.seed}};
  if (c.world_path) j["world"] = *c.world_path;
  if (c.world_spec) j["world_spec"] = *c.world_spec;
  if (c.ingest) {
    j["ingest"] = {{"bugs", c.ingest->bugs},
                   {"target_axis", c.ingest->target_axis},
                   {"fuzzer_axis", c.ingest->fuzzer_axis},
                   {"descriptions", c.ingest->descriptions},
                   {"toolchains", c.ingest->toolchains},
                   {"patches", c.ingest->patches}};
  }
  if (c.bugs_path) j["bugs"] = *c.bugs_path;
  if (c.cache_path) j["cache"] = *c.cache_path;
  return j;
}

CampaignConfig ConfigFromJson(const Json &j, std::string_view source) {
  const std::string where(source);
  if (!j.is_object()) Fail(ErrorCode::kValidation, where + ": config is not an object");
  if (j.contains("schema")) RequireSchema(j, kConfigSchema, source);
  RejectUnknown(j, ConfigKeys(), where);
  CampaignConfig c;
  std::string key;
  try {
    key = "world";
    if (j.contains(key)) c.world_path = j.at(key).get<std::string>();
    key = "world_spec";
    if (j.contains(key)) {
      RejectUnknown(j.at(key), {"seed", "target_start", "fuzzer_start", "end", "bugs",
                                "factor_mix", "p_min", "p_max", "find_minutes_min",
                                "find_minutes_max", "random_find_times",
                                "memory_leak_fraction", "unstable_density",
                                "block_probability", "noise_crash_rate", "d2_mean_days",
                                "merge_fraction", "target_commits_per_day_max",
                                "fuzzer_commits_per_day", "description_noise_edits",
                                "sys_edits", "legacy_inout", "vm_knee", "reference_vms",
                                "schema"},
                    where + ": world_spec");
      c.world_spec = j.at(key).get<WorldSpec>();
    }
    key = "ingest";
    if (j.contains(key)) {
      const Json &in = j.at(key);
      RejectUnknown(in, IngestKeys(), where + ": ingest");
      IngestPaths p;
      for (const auto &[name, dest] :
           std::initializer_list<std::pair<const char *, std::string *>>{
               {"bugs", &p.bugs},
               {"target_axis", &p.target_axis},
               {"fuzzer_axis", &p.fuzzer_axis},
               {"descriptions", &p.descriptions},
               {"toolchains", &p.toolchains},
               {"patches", &p.patches}}) {
        key = std::string("ingest.") + name;
        if (in.contains(name)) *dest = in.at(name).get<std::string>();
      }
      c.ingest = p;
    }
    key = "bugs";
    if (j.contains(key)) c.bugs_path = j.at(key).get<std::string>();
    key = "epoch";
    if (j.contains(key)) c.epoch = j.at(key).get<Day>();
    key = "blocking_threshold";
    if (j.contains(key)) c.blocking_threshold = j.at(key).get<double>();
    key = "retry";
    if (j.contains(key)) c.retry = j.at(key).get<bool>();
    key = "retry_budget";
    if (j.contains(key)) c.retry_budget = j.at(key).get<FuzzBudget>();
    key = "vm_count";
    if (j.contains(key)) c.vm_count = j.at(key).get<int>();
    key = "parallelism";
    if (j.contains(key)) c.parallelism = j.at(key).get<int>();
    key = "cache";
    if (j.contains(key)) c.cache_path = j.at(key).get<std::string>();
    key = "output";
    if (j.contains(key)) c.output_dir = j.at(key).get<std::string>();
    key = "seed";
    if (j.contains(key)) c.seed = j.at(key).get<uint64_t>();
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kValidation, where + ": field '" + key + "': " + e.what());
  } catch (const Error &e) {
    Fail(ErrorCode::kValidation, where + ": field '" + key + "': " + e.what());
  }
  return c;
}

CampaignResult RunCampaign(const SyntheticWorld &world, std::span<const BugRecord> bugs,
                           const RetrospectOptions &options, ProbeCache *cache,
                           int parallelism) {
  if (parallelism < 1) Fail(ErrorCode::kArgument, "parallelism must be >= 1");
  const auto fix_index = world.FixIndex();
  const RetroContext ctx{world.target_axis(), world.fuzzer_axis(), world.descriptions(),
                         world,   cache,           &world.toolchains(),
                         &world.patches(), &fix_index};
  std::vector<std::optional<RetrospectionReport>> reports(bugs.size());
  std::vector<std::optional<std::string>> errors(bugs.size());
  std::atomic<size_t> next{0};
  std::mutex stats_mu;
  CampaignResult result;
  auto worker = [&]() {
    RetroStats local;
    for (size_t i = next++; i < bugs.size(); i = next++) {
      try {
        reports[i] = RetrospectBug(bugs[i], ctx, options, &local);
      } catch (const std::exception &e) {
        errors[i] = e.what();
      }
    }
    std::lock_guard<std::mutex> lock(stats_mu);
    result.stats.oracle_sessions += local.oracle_sessions;
    result.stats.cache_hits += local.cache_hits;
  };
  const int threads = std::min<int>(parallelism, std::max<size_t>(bugs.size(), 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  for (size_t i = 0; i < bugs.size(); ++i) {
    if (reports[i]) {
      result.reports.push_back(std::move(*reports[i]));
    } else {
      result.failures.push_back({bugs[i].id, errors[i].value_or("unknown error")});
    }
  }
  return result;
}

Json CampaignIndex(const CampaignResult &result, std::string_view config_hash,
                   uint64_t seed) {
  std::map<std::string, int> counts = {{"completed", 0},
                                       {"skipped_unreproducible", 0},
                                       {"never_describable", 0},
                                       {"unstable_range", 0},
                                       {"needs_manual_review", 0},
                                       {"failed", static_cast<int>(result.failures.size())}};
  Json rows = Json::array();
  for (const auto &r : result.reports) {
    ++counts[std::string(ToString(r.status))];
    const bool completed = r.status == ReportStatus::kCompleted;
    if (completed && r.factor_class == FactorClass::kNeedsManualReview) {
      ++counts["needs_manual_review"];
    }
    Json row = {{"bug_id", r.bug_id},
                {"status", ToString(r.status)},
                {"revealing_commit", r.revealing_commit},
                {"report", "reports/" + r.bug_id + ".json"}};
    if (completed) row["factor_class"] = ToString(r.factor_class);
    rows.push_back(row);
  }
  Json failures = Json::array();
  for (const auto &f : result.failures) {
    failures.push_back({{"bug_id", f.bug_id}, {"error", f.message}});
  }
  return Json{{"schema", kCampaignSchema},
              {"config_hash", config_hash},
              {"seed", seed},
              {"counts", counts},
              {"bugs", rows},
              {"failures", failures}};
}

}  // namespace retro
