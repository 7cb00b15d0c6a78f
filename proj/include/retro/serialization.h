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

#ifndef RETRO_SERIALIZATION_H_
#define RETRO_SERIALIZATION_H_

// JSON documents for every persisted type. Top-level documents carry a
// "schema" field; readers reject unknown schemas.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "retro/error.h"
#include "retro/bug.h"
#include "retro/calendar.h"
#include "retro/description_history.h"
#include "retro/history.h"
#include "retro/oracle.h"
#include "retro/retrospect.h"
#include "retro/synthetic_world.h"

namespace retro {

using Json = nlohmann::json;

inline constexpr std::string_view kReportSchema = "retro.report/1";
inline constexpr std::string_view kCampaignSchema = "retro.campaign/1";
inline constexpr std::string_view kWorldSchema = "retro.world/1";
inline constexpr std::string_view kBugsSchema = "retro.bugs/1";
inline constexpr std::string_view kWorldSpecSchema = "retro.world-spec/1";

void to_json(Json &j, const Day &d);
void from_json(const Json &j, Day &d);
void to_json(Json &j, const Commit &c);
void from_json(const Json &j, Commit &c);
void to_json(Json &j, const FuzzEnvironment &e);
void from_json(const Json &j, FuzzEnvironment &e);
void to_json(Json &j, const FuzzBudget &b);
void from_json(const Json &j, FuzzBudget &b);
void to_json(Json &j, const SessionOutcome &o);
void from_json(const Json &j, SessionOutcome &o);
void to_json(Json &j, const BugRecord &b);
void from_json(const Json &j, BugRecord &b);
void to_json(Json &j, const ProbeResult &p);
void from_json(const Json &j, ProbeResult &p);
void to_json(Json &j, const BlockingCandidate &c);
void from_json(const Json &j, BlockingCandidate &c);
void to_json(Json &j, const RetrospectionReport &r);
void from_json(const Json &j, RetrospectionReport &r);
void to_json(Json &j, const WorldSpec &s);
void from_json(const Json &j, WorldSpec &s);
void to_json(Json &j, const BugTruth &t);
void from_json(const Json &j, BugTruth &t);
void to_json(Json &j, const BackgroundBug &b);
void from_json(const Json &j, BackgroundBug &b);
void to_json(Json &j, const FileVersion &v);
void from_json(const Json &j, FileVersion &v);
void to_json(Json &j, const ToolchainRange &r);
void from_json(const Json &j, ToolchainRange &r);
void to_json(Json &j, const PatchRule &r);
void from_json(const Json &j, PatchRule &r);

// Parses `text` as JSON; throws kParse naming `source`.
Json ParseJson(std::string_view text, std::string_view source);
// Converts with field-level diagnostics: kValidation naming `source`.
template <typename T>
T FromJsonChecked(const Json &j, std::string_view source) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kValidation, std::string(source) + ": " + e.what());
  }
}
// Throws kValidation unless j["schema"] == schema.
void RequireSchema(const Json &j, std::string_view schema, std::string_view source);

Json WorldToJson(const WorldData &world);
WorldData WorldFromJson(const Json &j, std::string_view source);
Json BugsToJson(std::span<const BugRecord> bugs);
std::vector<BugRecord> BugsFromJson(const Json &j, std::string_view source);
Json ReportToJson(const RetrospectionReport &report, std::string_view config_hash,
                  uint64_t seed);
RetrospectionReport ReportFromJson(const Json &j, std::string_view source);

// Stable text form: sorted keys, two-space indent, trailing newline.
std::string Dump(const Json &j);

}  // namespace retro

#endif  // RETRO_SERIALIZATION_H_
