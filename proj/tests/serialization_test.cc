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

#include <gtest/gtest.h>

#include <functional>

#include "retro/campaign.h"
#include "retro/error.h"
#include "retro/synthetic_world.h"

namespace retro {
namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kArgument;
}

WorldSpec SmallSpec(uint64_t seed) {
  WorldSpec s;
  s.seed = seed;
  s.bugs = 12;
  s.unstable_density = 0.05;
  s.p_min = 0.7;
  return s;
}

TEST(SerializationTest, DayIsIsoString) {
  const Json j = Day::FromIso("2020-02-29");
  EXPECT_EQ(j, "2020-02-29");
  EXPECT_EQ(j.get<Day>(), Day::FromIso("2020-02-29"));
  EXPECT_EQ(CodeOf([] { Json("2020-13-01").get<Day>(); }), ErrorCode::kParse);
}

TEST(SerializationTest, WorldRoundTrip) {
  const SyntheticWorld world = GenerateWorld(SmallSpec(4));
  const Json j = WorldToJson(world.data());
  const WorldData back = WorldFromJson(ParseJson(Dump(j), "mem"), "mem");
  EXPECT_EQ(Dump(WorldToJson(back)), Dump(j));
  const SyntheticWorld rebuilt(back);
  EXPECT_EQ(rebuilt.target_axis().size(), world.target_axis().size());
  for (const BugRecord &b : world.bugs()) {
    EXPECT_EQ(rebuilt.Truth(b.id).revealing_commit, world.Truth(b.id).revealing_commit);
  }
}

TEST(SerializationTest, BugsRoundTrip) {
  const SyntheticWorld world = GenerateWorld(SmallSpec(5));
  const Json j = BugsToJson(world.bugs());
  const auto bugs = BugsFromJson(j, "mem");
  ASSERT_EQ(bugs.size(), world.bugs().size());
  EXPECT_EQ(Dump(BugsToJson(bugs)), Dump(j));
}

TEST(SerializationTest, ReportRoundTrip) {
  const SyntheticWorld world = GenerateWorld(SmallSpec(6));
  const auto fixes = world.FixIndex();
  const RetroContext ctx{world.target_axis(), world.fuzzer_axis(), world.descriptions(),
                         world,  nullptr,  &world.toolchains(), &world.patches(), &fixes};
  for (const BugRecord &bug : world.bugs()) {
    const auto report = RetrospectBug(bug, ctx, RetrospectOptions{});
    const Json j = ReportToJson(report, "cafe", 6);
    EXPECT_EQ(j.at("schema"), kReportSchema);
    EXPECT_EQ(j.at("config_hash"), "cafe");
    const auto back = ReportFromJson(ParseJson(Dump(j), "mem"), "mem");
    EXPECT_EQ(Dump(ReportToJson(back, "cafe", 6)), Dump(j)) << bug.id;
  }
}

TEST(SerializationTest, SchemaErrors) {
  Json j = BugsToJson({});
  j["schema"] = "retro.bugs/9";
  EXPECT_EQ(CodeOf([&] { BugsFromJson(j, "b.json"); }), ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { ParseJson("{oops", "x.json"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { RequireSchema(Json::object(), kWorldSchema, "w"); }),
            ErrorCode::kValidation);
  Json bad = BugsToJson(GenerateWorld(SmallSpec(7)).bugs());
  bad["bugs"][0]["finding_date"] = 17;
  EXPECT_EQ(CodeOf([&] { BugsFromJson(bad, "b.json"); }), ErrorCode::kValidation);
}

TEST(ConfigTest, RoundTripAndHash) {
  CampaignConfig c;
  c.world_spec = SmallSpec(3);
  c.seed = 11;
  c.cache_path = "/tmp/x.log";
  const CampaignConfig back = ConfigFromJson(ConfigToJson(c), "cfg");
  EXPECT_EQ(Dump(ConfigToJson(back)), Dump(ConfigToJson(c)));
  EXPECT_EQ(back.Hash(), c.Hash());
  CampaignConfig ops = c;
  ops.parallelism = 8;
  ops.output_dir = "elsewhere";
  ops.cache_path.reset();
  EXPECT_EQ(ops.Hash(), c.Hash());
  CampaignConfig other = c;
  other.vm_count = 5;
  EXPECT_NE(other.Hash(), c.Hash());
}

TEST(ConfigTest, UnknownKeyNamesField) {
  CampaignConfig c;
  c.world_path = "w.json";
  Json j = ConfigToJson(c);
  j["paralelism"] = 4;
  try {
    ConfigFromJson(j, "cfg.json");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("paralelism"), std::string::npos);
  }
}

TEST(ConfigTest, ExactlyOneSource) {
  CampaignConfig c;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kValidation);
  c.world_path = "w.json";
  c.Validate();
  c.world_spec = WorldSpec{};
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kValidation);
  CampaignConfig zero;
  zero.world_path = "w.json";
  zero.parallelism = 0;
  EXPECT_EQ(CodeOf([&] { zero.Validate(); }), ErrorCode::kValidation);
}

TEST(CampaignTest, ParallelMatchesSerial) {
  WorldSpec spec = SmallSpec(9);
  spec.bugs = 30;
  const SyntheticWorld world = GenerateWorld(spec);
  const RetrospectOptions options;
  const auto serial = RunCampaign(world, world.bugs(), options, nullptr, 1);
  const auto parallel = RunCampaign(world, world.bugs(), options, nullptr, 4);
  ASSERT_EQ(serial.reports.size(), parallel.reports.size());
  for (size_t i = 0; i < serial.reports.size(); ++i) {
    EXPECT_EQ(Dump(ReportToJson(serial.reports[i], "", 0)),
              Dump(ReportToJson(parallel.reports[i], "", 0)));
  }
  EXPECT_EQ(serial.stats.oracle_sessions, parallel.stats.oracle_sessions);
  const Json index = CampaignIndex(serial, "h", 9);
  EXPECT_EQ(index.at("schema"), kCampaignSchema);
  int counted = 0;
  for (const auto &[k, v] : index.at("counts").items()) counted += v.get<int>();
  EXPECT_EQ(counted, 30);
}

TEST(CampaignTest, SharedCacheWarmRun) {
  WorldSpec spec = SmallSpec(10);
  spec.bugs = 20;
  const SyntheticWorld world = GenerateWorld(spec);
  ProbeCache cache;
  const auto cold = RunCampaign(world, world.bugs(), RetrospectOptions{}, &cache, 3);
  const auto warm = RunCampaign(world, world.bugs(), RetrospectOptions{}, &cache, 3);
  EXPECT_GT(cold.stats.oracle_sessions, 0);
  EXPECT_EQ(warm.stats.oracle_sessions, 0);
  for (size_t i = 0; i < cold.reports.size(); ++i) {
    EXPECT_EQ(Dump(ReportToJson(cold.reports[i], "", 0)),
              Dump(ReportToJson(warm.reports[i], "", 0)));
  }
}

TEST(CampaignTest, UnknownBugBecomesFailure) {
  const SyntheticWorld world = GenerateWorld(SmallSpec(12));
  std::vector<BugRecord> bugs(world.bugs().begin(), world.bugs().end());
  bugs[0].finding_commit = "no-such-commit";
  const auto result = RunCampaign(world, bugs, RetrospectOptions{}, nullptr, 2);
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].bug_id, bugs[0].id);
  EXPECT_EQ(result.reports.size(), bugs.size() - 1);
}

}  // namespace
}  // namespace retro
