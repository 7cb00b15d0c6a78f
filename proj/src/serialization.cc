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

#include "retro/serialization.h"

#include <optional>

#include "retro/error.h"

namespace retro {
namespace {

template <typename T>
void PutOptional(Json &j, const char *key, const std::optional<T> &value) {
  if (value) j[key] = *value;
}

template <typename T>
std::optional<T> GetOptional(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

template <typename T>
void GetIfPresent(const Json &j, const char *key, T &out) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) out = it->template get<T>();
}

std::string AxisName(AxisKind kind) { return std::string(ToString(kind)); }

}  // namespace

void to_json(Json &j, const Day &d) { j = d.ToIso(); }
void from_json(const Json &j, Day &d) { d = Day::FromIso(j.get<std::string>()); }

void to_json(Json &j, const Commit &c) {
  j = Json{{"id", c.id},          {"date", c.day},
           {"day_index", c.day_index}, {"parents", c.parents},
           {"message", c.message}, {"touched_paths", c.touched_paths}};
}
void from_json(const Json &j, Commit &c) {
  c.id = j.at("id").get<std::string>();
  c.day = j.at("date").get<Day>();
  c.day_index = j.at("day_index").get<int>();
  GetIfPresent(j, "parents", c.parents);
  GetIfPresent(j, "message", c.message);
  GetIfPresent(j, "touched_paths", c.touched_paths);
}

void to_json(Json &j, const FuzzEnvironment &e) {
  j = Json{{"target_commit", e.target_commit},
           {"fuzzer_commit", e.fuzzer_commit},
           {"description_commit", e.description_commit},
           {"focused_set", e.focused_set_hash},
           {"toolchain", e.toolchain},
           {"config", e.config},
           {"patches", e.patches},
           {"seeded_reproducer", e.seeded_reproducer},
           {"vm_count", e.vm_count}};
}
void from_json(const Json &j, FuzzEnvironment &e) {
  e.target_commit = j.at("target_commit").get<std::string>();
  e.fuzzer_commit = j.at("fuzzer_commit").get<std::string>();
  e.description_commit = j.at("description_commit").get<std::string>();
  GetIfPresent(j, "focused_set", e.focused_set_hash);
  GetIfPresent(j, "toolchain", e.toolchain);
  GetIfPresent(j, "config", e.config);
  GetIfPresent(j, "patches", e.patches);
  GetIfPresent(j, "seeded_reproducer", e.seeded_reproducer);
  GetIfPresent(j, "vm_count", e.vm_count);
}

void to_json(Json &j, const FuzzBudget &b) {
  j = Json{{"max_time", b.max_time}, {"attempts", b.attempts}};
}
void from_json(const Json &j, FuzzBudget &b) {
  b.max_time = j.at("max_time").get<double>();
  b.attempts = j.at("attempts").get<int>();
}

void to_json(Json &j, const SessionOutcome &o) {
  j = Json{{"status", ToString(o.status)},
           {"observed_crashes", o.observed_crashes},
           {"attempts_run", o.attempts_run}};
  PutOptional(j, "time_to_find", o.time_to_find);
  if (o.unstable_reason) j["unstable_reason"] = ToString(*o.unstable_reason);
}
void from_json(const Json &j, SessionOutcome &o) {
  o.status = ParseSessionStatus(j.at("status").get<std::string>());
  o.time_to_find = GetOptional<double>(j, "time_to_find");
  if (auto r = GetOptional<std::string>(j, "unstable_reason")) {
    o.unstable_reason = ParseUnstableReason(*r);
  }
  GetIfPresent(j, "observed_crashes", o.observed_crashes);
  GetIfPresent(j, "attempts_run", o.attempts_run);
}

void to_json(Json &j, const BugRecord &b) {
  j = Json{{"id", b.id},
           {"title", b.title},
           {"finding_commit", b.finding_commit},
           {"finding_date", b.finding_date},
           {"guilty_commits", b.guilty_commits},
           {"guilty_date", b.guilty_date},
           {"fix_commits", b.fix_commits},
           {"fix_dates", b.fix_dates},
           {"reproducer_calls", b.reproducer_calls},
           {"crash_kind", ToString(b.crash_kind)},
           {"config", b.config},
           {"crash_function", b.crash_function},
           {"sanitizer", b.sanitizer},
           {"crash_path", b.crash_path}};
  PutOptional(j, "duplicate_group", b.duplicate_group);
}
void from_json(const Json &j, BugRecord &b) {
  b.id = j.at("id").get<std::string>();
  GetIfPresent(j, "title", b.title);
  b.finding_commit = j.at("finding_commit").get<std::string>();
  b.finding_date = j.at("finding_date").get<Day>();
  b.guilty_commits = j.at("guilty_commits").get<std::vector<std::string>>();
  b.guilty_date = j.at("guilty_date").get<Day>();
  GetIfPresent(j, "fix_commits", b.fix_commits);
  GetIfPresent(j, "fix_dates", b.fix_dates);
  b.reproducer_calls = j.at("reproducer_calls").get<std::vector<std::string>>();
  if (auto k = GetOptional<std::string>(j, "crash_kind")) b.crash_kind = ParseCrashKind(*k);
  GetIfPresent(j, "config", b.config);
  b.duplicate_group = GetOptional<std::string>(j, "duplicate_group");
  GetIfPresent(j, "crash_function", b.crash_function);
  GetIfPresent(j, "sanitizer", b.sanitizer);
  GetIfPresent(j, "crash_path", b.crash_path);
}

void to_json(Json &j, const ProbeResult &p) {
  j = Json{{"phase", p.phase},       {"tag", p.tag},
           {"environment", p.environment}, {"budget", p.budget},
           {"outcome", p.outcome},   {"cached", p.cached},
           {"undescribable", p.undescribable}};
}
void from_json(const Json &j, ProbeResult &p) {
  p.phase = j.at("phase").get<std::string>();
  GetIfPresent(j, "tag", p.tag);
  p.environment = j.at("environment").get<FuzzEnvironment>();
  GetIfPresent(j, "budget", p.budget);
  p.outcome = j.at("outcome").get<SessionOutcome>();
  GetIfPresent(j, "cached", p.cached);
  GetIfPresent(j, "undescribable", p.undescribable);
}

void to_json(Json &j, const BlockingCandidate &c) {
  j = Json{{"bug_id", c.bug_id}, {"rate", c.rate}};
}
void from_json(const Json &j, BlockingCandidate &c) {
  c.bug_id = j.at("bug_id").get<std::string>();
  c.rate = j.at("rate").get<double>();
}

void to_json(Json &j, const RetrospectionReport &r) {
  j = Json{{"bug_id", r.bug_id},
           {"status", ToString(r.status)},
           {"revealing_commit", r.revealing_commit},
           {"unstable_commits", r.unstable_commits},
           {"revealing_axis", AxisName(r.revealing_axis)},
           {"factor_class", ToString(r.factor_class)},
           {"guilty_date", r.guilty_date},
           {"finding_date", r.finding_date},
           {"focused_set", r.focused_set_hash},
           {"directory", r.directory},
           {"session_log", r.session_log},
           {"blocking_candidates", r.blocking_candidates},
           {"notes", r.notes}};
  PutOptional(j, "revealing_range_older", r.revealing_range_older);
  PutOptional(j, "revealing_date", r.revealing_date);
  PutOptional(j, "d1_days", r.d1_days);
  PutOptional(j, "d2_days", r.d2_days);
  PutOptional(j, "budget", r.budget);
}
void from_json(const Json &j, RetrospectionReport &r) {
  r.bug_id = j.at("bug_id").get<std::string>();
  r.status = ParseReportStatus(j.at("status").get<std::string>());
  GetIfPresent(j, "revealing_commit", r.revealing_commit);
  r.revealing_range_older = GetOptional<std::string>(j, "revealing_range_older");
  GetIfPresent(j, "unstable_commits", r.unstable_commits);
  if (auto a = GetOptional<std::string>(j, "revealing_axis")) {
    r.revealing_axis = ParseAxisKind(*a);
  }
  r.factor_class = ParseFactorClass(j.at("factor_class").get<std::string>());
  r.revealing_date = GetOptional<Day>(j, "revealing_date");
  r.guilty_date = j.at("guilty_date").get<Day>();
  r.finding_date = j.at("finding_date").get<Day>();
  r.d1_days = GetOptional<int>(j, "d1_days");
  r.d2_days = GetOptional<int>(j, "d2_days");
  r.budget = GetOptional<FuzzBudget>(j, "budget");
  GetIfPresent(j, "focused_set", r.focused_set_hash);
  GetIfPresent(j, "directory", r.directory);
  GetIfPresent(j, "session_log", r.session_log);
  GetIfPresent(j, "blocking_candidates", r.blocking_candidates);
  GetIfPresent(j, "notes", r.notes);
}

void to_json(Json &j, const WorldSpec &s) {
  Json mix = Json::object();
  for (const auto &[f, share] : s.factor_mix) mix[std::string(ToString(f))] = share;
  j = Json{{"seed", s.seed},
           {"target_start", s.target_start},
           {"fuzzer_start", s.fuzzer_start},
           {"end", s.end},
           {"bugs", s.bugs},
           {"factor_mix", mix},
           {"p_min", s.p_min},
           {"p_max", s.p_max},
           {"find_minutes_min", s.find_minutes_min},
           {"find_minutes_max", s.find_minutes_max},
           {"random_find_times", s.random_find_times},
           {"memory_leak_fraction", s.memory_leak_fraction},
           {"unstable_density", s.unstable_density},
           {"block_probability", s.block_probability},
           {"noise_crash_rate", s.noise_crash_rate},
           {"d2_mean_days", s.d2_mean_days},
           {"merge_fraction", s.merge_fraction},
           {"target_commits_per_day_max", s.target_commits_per_day_max},
           {"fuzzer_commits_per_day", s.fuzzer_commits_per_day},
           {"description_noise_edits", s.description_noise_edits},
           {"sys_edits", s.sys_edits},
           {"legacy_inout", s.legacy_inout},
           {"vm_knee", s.vm_knee},
           {"reference_vms", s.reference_vms}};
}
void from_json(const Json &j, WorldSpec &s) {
  GetIfPresent(j, "seed", s.seed);
  GetIfPresent(j, "target_start", s.target_start);
  GetIfPresent(j, "fuzzer_start", s.fuzzer_start);
  GetIfPresent(j, "end", s.end);
  GetIfPresent(j, "bugs", s.bugs);
  if (auto it = j.find("factor_mix"); it != j.end()) {
    s.factor_mix.clear();
    for (const auto &[name, share] : it->items()) {
      s.factor_mix[ParseFactorClass(name)] = share.get<double>();
    }
  }
  GetIfPresent(j, "p_min", s.p_min);
  GetIfPresent(j, "p_max", s.p_max);
  GetIfPresent(j, "find_minutes_min", s.find_minutes_min);
  GetIfPresent(j, "find_minutes_max", s.find_minutes_max);
  GetIfPresent(j, "random_find_times", s.random_find_times);
  GetIfPresent(j, "memory_leak_fraction", s.memory_leak_fraction);
  GetIfPresent(j, "unstable_density", s.unstable_density);
  GetIfPresent(j, "block_probability", s.block_probability);
  GetIfPresent(j, "noise_crash_rate", s.noise_crash_rate);
  GetIfPresent(j, "d2_mean_days", s.d2_mean_days);
  GetIfPresent(j, "merge_fraction", s.merge_fraction);
  GetIfPresent(j, "target_commits_per_day_max", s.target_commits_per_day_max);
  GetIfPresent(j, "fuzzer_commits_per_day", s.fuzzer_commits_per_day);
  GetIfPresent(j, "description_noise_edits", s.description_noise_edits);
  GetIfPresent(j, "sys_edits", s.sys_edits);
  GetIfPresent(j, "legacy_inout", s.legacy_inout);
  GetIfPresent(j, "vm_knee", s.vm_knee);
  GetIfPresent(j, "reference_vms", s.reference_vms);
}

void to_json(Json &j, const BugTruth &t) {
  j = Json{{"bug_id", t.bug_id},
           {"factor", ToString(t.factor)},
           {"revealing_axis", AxisName(t.revealing_axis)},
           {"revealing_commit", t.revealing_commit},
           {"revealing_date", t.revealing_date},
           {"p", t.p},
           {"mean_find_minutes", t.mean_find_minutes},
           {"block_probability", t.block_probability}};
  PutOptional(j, "blocker", t.blocker);
}
void from_json(const Json &j, BugTruth &t) {
  t.bug_id = j.at("bug_id").get<std::string>();
  t.factor = ParseFactorClass(j.at("factor").get<std::string>());
  t.revealing_axis = ParseAxisKind(j.at("revealing_axis").get<std::string>());
  t.revealing_commit = j.at("revealing_commit").get<std::string>();
  t.revealing_date = j.at("revealing_date").get<Day>();
  t.p = j.at("p").get<double>();
  t.mean_find_minutes = j.at("mean_find_minutes").get<double>();
  GetIfPresent(j, "block_probability", t.block_probability);
  t.blocker = GetOptional<std::string>(j, "blocker");
}

void to_json(Json &j, const BackgroundBug &b) {
  j = Json{{"id", b.id},
           {"title", b.title},
           {"guilty_commit", b.guilty_commit},
           {"fix_commit", b.fix_commit}};
}
void from_json(const Json &j, BackgroundBug &b) {
  b.id = j.at("id").get<std::string>();
  GetIfPresent(j, "title", b.title);
  b.guilty_commit = j.at("guilty_commit").get<std::string>();
  b.fix_commit = j.at("fix_commit").get<std::string>();
}

void to_json(Json &j, const FileVersion &v) {
  j = Json{{"path", v.path}, {"fuzzer_commit", v.fuzzer_commit}};
  if (v.text) {
    j["text"] = *v.text;
  } else {
    j["deleted"] = true;
  }
}
void from_json(const Json &j, FileVersion &v) {
  v.path = j.at("path").get<std::string>();
  v.fuzzer_commit = j.at("fuzzer_commit").get<std::string>();
  v.text = GetOptional<std::string>(j, "text");
}

void to_json(Json &j, const ToolchainRange &r) {
  j = Json{{"first", r.first}, {"last", r.last}, {"toolchain", r.toolchain}};
}
void from_json(const Json &j, ToolchainRange &r) {
  r.first = j.at("first").get<Day>();
  r.last = j.at("last").get<Day>();
  r.toolchain = j.at("toolchain").get<std::string>();
}

void to_json(Json &j, const PatchRule &r) {
  j = Json{{"axis", AxisName(r.axis)},
           {"older", r.older},
           {"newer", r.newer},
           {"patch", r.patch}};
}
void from_json(const Json &j, PatchRule &r) {
  r.axis = ParseAxisKind(j.at("axis").get<std::string>());
  r.older = j.at("older").get<std::string>();
  r.newer = j.at("newer").get<std::string>();
  r.patch = j.at("patch").get<std::string>();
}

Json ParseJson(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    Fail(ErrorCode::kParse, std::string(source) + ": " + e.what());
  }
}

void RequireSchema(const Json &j, std::string_view schema, std::string_view source) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
    Fail(ErrorCode::kValidation, std::string(source) + ": missing field 'schema'");
  }
  const std::string got = j["schema"].get<std::string>();
  if (got != schema) {
    Fail(ErrorCode::kValidation, std::string(source) + ": field 'schema' is '" + got +
                                     "', expected '" + std::string(schema) + "'");
  }
}

namespace {

Json MarksToJson(const std::map<std::string, UnstableReason, std::less<>> &marks) {
  Json out = Json::object();
  for (const auto &[id, reason] : marks) out[id] = ToString(reason);
  return out;
}

std::map<std::string, UnstableReason, std::less<>> MarksFromJson(const Json &j) {
  std::map<std::string, UnstableReason, std::less<>> out;
  for (const auto &[id, reason] : j.items()) {
    out.emplace(id, ParseUnstableReason(reason.get<std::string>()));
  }
  return out;
}

}  // namespace

Json WorldToJson(const WorldData &w) {
  return Json{{"schema", kWorldSchema},
              {"spec", w.spec},
              {"target_graph", w.target_graph},
              {"target_head", w.target_head},
              {"fuzzer_commits", w.fuzzer_commits},
              {"target_unstable", MarksToJson(w.target_unstable)},
              {"fuzzer_unstable", MarksToJson(w.fuzzer_unstable)},
              {"descriptions", w.descriptions},
              {"bugs", w.bugs},
              {"truth", w.truth},
              {"background", w.background},
              {"toolchains", w.toolchains},
              {"patches", w.patches},
              {"noise_crashes", w.noise_crashes}};
}

WorldData WorldFromJson(const Json &j, std::string_view source) {
  RequireSchema(j, kWorldSchema, source);
  try {
    WorldData w;
    w.spec = j.at("spec").get<WorldSpec>();
    w.target_graph = j.at("target_graph").get<std::vector<Commit>>();
    w.target_head = j.at("target_head").get<std::string>();
    w.fuzzer_commits = j.at("fuzzer_commits").get<std::vector<Commit>>();
    w.target_unstable = MarksFromJson(j.at("target_unstable"));
    w.fuzzer_unstable = MarksFromJson(j.at("fuzzer_unstable"));
    w.descriptions = j.at("descriptions").get<std::vector<FileVersion>>();
    w.bugs = j.at("bugs").get<std::vector<BugRecord>>();
    w.truth = j.at("truth").get<std::vector<BugTruth>>();
    w.background = j.at("background").get<std::vector<BackgroundBug>>();
    w.toolchains = j.at("toolchains").get<std::vector<ToolchainRange>>();
    w.patches = j.at("patches").get<std::vector<PatchRule>>();
    GetIfPresent(j, "noise_crashes", w.noise_crashes);
    return w;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kValidation, std::string(source) + ": " + e.what());
  }
}

Json BugsToJson(std::span<const BugRecord> bugs) {
  return Json{{"schema", kBugsSchema},
              {"bugs", std::vector<BugRecord>(bugs.begin(), bugs.end())}};
}

std::vector<BugRecord> BugsFromJson(const Json &j, std::string_view source) {
  const Json *list = &j;
  if (j.is_object()) {
    RequireSchema(j, kBugsSchema, source);
    list = &j.at("bugs");
  }
  if (!list->is_array()) {
    Fail(ErrorCode::kValidation, std::string(source) + ": field 'bugs' is not an array");
  }
  std::vector<BugRecord> out;
  for (size_t i = 0; i < list->size(); ++i) {
    out.push_back(FromJsonChecked<BugRecord>(
        (*list)[i], std::string(source) + ": bugs[" + std::to_string(i) + "]"));
    ValidateBugRecord(out.back());
  }
  return out;
}

Json ReportToJson(const RetrospectionReport &report, std::string_view config_hash,
                  uint64_t seed) {
  Json j = report;
  j["schema"] = kReportSchema;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  return j;
}

RetrospectionReport ReportFromJson(const Json &j, std::string_view source) {
  RequireSchema(j, kReportSchema, source);
  return FromJsonChecked<RetrospectionReport>(j, source);
}

std::string Dump(const Json &j) { return j.dump(2) + "\n"; }

}  // namespace retro
