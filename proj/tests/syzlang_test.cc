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

#include <algorithm>

#include "retro/description_history.h"
#include "retro/error.h"
#include "retro/syzlang.h"
#include "test_support.h"

namespace retro {
namespace {

using testing::InoutCorpus;

std::set<std::string> WithoutMandatory(std::set<std::string> names) {
  for (const auto &m : DefaultMandatoryCalls()) names.erase(m);
  return names;
}

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kArgument;
}

TEST(SyzlangParseTest, InoutExampleEntities) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  for (const char *name : {"my_resource", "producer", "consumer", "parent", "child"}) {
    EXPECT_NE(corpus.Find(name), nullptr) << name;
  }
  EXPECT_EQ(corpus.Find("my_resource")->kind, EntityKind::kResource);
  EXPECT_EQ(corpus.Find("parent")->kind, EntityKind::kStruct);
  ASSERT_TRUE(corpus.Find("producer")->produces);
  EXPECT_EQ(*corpus.Find("producer")->produces, "my_resource");
  EXPECT_EQ(corpus.Find("parent")->members.at(0).direction, Direction::kIn);
  EXPECT_TRUE(corpus.diagnostics().empty());
}

TEST(SyzlangParseTest, SourceLocations) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  EXPECT_EQ(corpus.Find("my_resource")->source_line, 1);
  EXPECT_EQ(corpus.Find("consumer")->source_line, 4);
  EXPECT_EQ(corpus.Find("child")->source_path, "sys/linux/inout.txt");
}

TEST(SyzlangParseTest, GrammarErrorNamesFileAndLine) {
  std::vector<SourceFile> bad = {{"a.txt", "resource r[intptr]\nfoo(x ptr[in,\n"}};
  try {
    ParseDescriptions(bad, false);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("a.txt:"), std::string::npos) << e.what();
  }
}

TEST(SyzlangParseTest, DuplicateDeclaration) {
  std::vector<SourceFile> dup = {{"a.txt", "s {\n\tx int32\n}\n"}, {"b.txt", "s {\n\ty int8\n}\n"}};
  try {
    ParseDescriptions(dup, false);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
    EXPECT_NE(std::string(e.what()).find("b.txt:1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("a.txt:1"), std::string::npos) << e.what();
  }
}

TEST(SyzlangParseTest, IgnoredDirectivesAndComments) {
  std::vector<SourceFile> src = {
      {"a.txt", "# comment\ninclude <linux/fs.h>\ndefine FOO 1\nresource r[fd]  # tail\n"}};
  const DescriptionCorpus corpus = ParseDescriptions(src, false);
  EXPECT_EQ(corpus.size(), 1u);
  EXPECT_NE(corpus.Find("r"), nullptr);
}

TEST(SyzlangParseTest, UnresolvedReferenceIsDiagnostic) {
  std::vector<SourceFile> src = {{"a.txt", "call(x ptr[in, missing_struct])\n"}};
  const DescriptionCorpus corpus = ParseDescriptions(src, false);
  ASSERT_FALSE(corpus.diagnostics().empty());
  EXPECT_NE(corpus.diagnostics()[0].find("missing_struct"), std::string::npos);
  EXPECT_EQ(corpus.UsageOf("call"), nullptr);
  EXPECT_EQ(CodeOf([&] { ResourceUsage(*corpus.Find("call"), corpus); }),
            ErrorCode::kResolution);
}

TEST(SyzlangUsageTest, InoutExampleModernConsumerOnly) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  const auto usage = ResourceUsage(*corpus.Find("consumer"), corpus);
  ASSERT_EQ(usage.size(), 1u);
  EXPECT_EQ(usage.at("my_resource"), ResourceRole::kConsumer);
  EXPECT_EQ(ResourceUsage(*corpus.Find("producer"), corpus).at("my_resource"),
            ResourceRole::kProducer);
}

TEST(SyzlangUsageTest, InoutExampleLegacyBoth) {
  const DescriptionCorpus corpus = InoutCorpus(true);
  EXPECT_EQ(ResourceUsage(*corpus.Find("consumer"), corpus).at("my_resource"),
            ResourceRole::kBoth);
}

TEST(SyzlangUsageTest, DirectionRules) {
  std::vector<SourceFile> src = {{"a.txt", R"(resource fd_x[fd]
resource h[intptr]
get(out ptr[out, fd_x])
put(in fd_x)
both(p ptr[inout, fd_x])
mixed(p ptr[inout, box])
box {
	a	fd_x	(out)
	b	h
}
)"}};
  const DescriptionCorpus corpus = ParseDescriptions(src, false);
  EXPECT_EQ(corpus.UsageOf("get")->at("fd_x"), ResourceRole::kProducer);
  EXPECT_EQ(corpus.UsageOf("put")->at("fd_x"), ResourceRole::kConsumer);
  EXPECT_EQ(corpus.UsageOf("both")->at("fd_x"), ResourceRole::kBoth);
  EXPECT_EQ(corpus.UsageOf("mixed")->at("fd_x"), ResourceRole::kProducer);
  EXPECT_EQ(corpus.UsageOf("mixed")->at("h"), ResourceRole::kBoth);
  const auto producers = corpus.ProducersOf("fd_x");
  EXPECT_EQ(std::vector<std::string>(producers.begin(), producers.end()),
            (std::vector<std::string>{"both", "get", "mixed"}));
  const auto consumers = corpus.ConsumersOf("fd_x");
  EXPECT_EQ(std::vector<std::string>(consumers.begin(), consumers.end()),
            (std::vector<std::string>{"both", "put"}));
}

TEST(SyzlangFocusTest, InoutExampleConsumer) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  const std::vector<std::string> seeds = {"consumer"};
  const FocusedSet set = Focus(corpus, seeds);
  EXPECT_EQ(WithoutMandatory(set.Names()),
            (std::set<std::string>{"my_resource", "producer", "consumer", "parent", "child"}));
  EXPECT_TRUE(set.Contains("mmap"));
  EXPECT_TRUE(set.Contains("syz_execute_func"));
  EXPECT_EQ(ValidateFocusedSet(corpus, set.Names(), seeds, DefaultMandatoryCalls()),
            std::nullopt);
}

TEST(SyzlangFocusTest, InoutExampleLegacyNeedsNoProducer) {
  const DescriptionCorpus corpus = InoutCorpus(true);
  const std::vector<std::string> seeds = {"consumer"};
  EXPECT_EQ(WithoutMandatory(Focus(corpus, seeds).Names()),
            (std::set<std::string>{"my_resource", "consumer", "parent", "child"}));
}

TEST(SyzlangFocusTest, Errors) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  const std::vector<std::string> unknown = {"nope"};
  EXPECT_EQ(CodeOf([&] { Focus(corpus, unknown); }), ErrorCode::kNotFound);

  std::vector<SourceFile> no_stubs = {{"inout.txt", testing::kInoutExample}};
  const DescriptionCorpus bare = ParseDescriptions(no_stubs, false);
  const std::vector<std::string> seeds = {"consumer"};
  EXPECT_EQ(CodeOf([&] { Focus(bare, seeds); }), ErrorCode::kCorpusIncomplete);

  std::vector<SourceFile> orphan = {{"o.txt", std::string("resource r[intptr]\nuse(x r)\n") +
                                                  testing::kMandatoryStubs}};
  const DescriptionCorpus orphaned = ParseDescriptions(orphan, false);
  const std::vector<std::string> use = {"use"};
  EXPECT_EQ(CodeOf([&] { Focus(orphaned, use); }), ErrorCode::kUnsatisfiableResource);
}

TEST(SyzlangFocusTest, PartnerPrefersFewestNewResources) {
  std::vector<SourceFile> src = {{"a.txt", std::string(R"(resource r[intptr]
resource extra[intptr]
use(x r)
make_a(e extra) r
make_b() r
make_extra() extra
)") + testing::kMandatoryStubs}};
  const DescriptionCorpus corpus = ParseDescriptions(src, false);
  const std::vector<std::string> seeds = {"use"};
  const FocusedSet set = Focus(corpus, seeds);
  EXPECT_TRUE(set.Contains("make_b"));
  EXPECT_FALSE(set.Contains("make_a"));
  EXPECT_FALSE(set.Contains("extra"));
}

TEST(SyzlangFocusTest, RenderParsesBackAndHashIgnoresOrder) {
  const DescriptionCorpus corpus = InoutCorpus(false);
  const std::vector<std::string> seeds = {"consumer"};
  const FocusedSet set = Focus(corpus, seeds);
  const std::string text = set.Render();
  std::vector<SourceFile> again = {{"focused.txt", text}};
  const DescriptionCorpus reparsed = ParseDescriptions(again, false);
  EXPECT_EQ(reparsed.size(), set.entities.size());
  for (const auto &[name, entity] : set.entities) {
    ASSERT_NE(reparsed.Find(name), nullptr) << name;
    EXPECT_EQ(PrintEntity(*reparsed.Find(name)), PrintEntity(*entity));
  }
  // Resources first, then types, then syscalls.
  EXPECT_LT(text.find("resource my_resource"), text.find("child {"));
  EXPECT_LT(text.find("parent {"), text.find("consumer("));

  std::vector<SourceFile> reordered = {{"stubs.txt", testing::kMandatoryStubs},
                                       {"x.txt", "child {\n\trec\tmy_resource\n}\n"
                                                 "consumer(p ptr[inout, parent])\n"
                                                 "parent {\n\tchild\tchild\t(in)\n}\n"
                                                 "producer(num int32) my_resource\n"
                                                 "resource my_resource[intptr]\n"}};
  const DescriptionCorpus shuffled = ParseDescriptions(reordered, false);
  EXPECT_EQ(Focus(shuffled, seeds).Hash(), set.Hash());
  EXPECT_EQ(set.Hash().size(), 16u);
}

TEST(SyzlangFocusTest, RandomCorporaPassIndependentCheck) {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    const auto g = testing::GenerateCorpus(seed, 50 + static_cast<int>(seed * 10));
    std::vector<SourceFile> src = {{"gen.txt", g.text}};
    const DescriptionCorpus corpus = ParseDescriptions(src, false);
    ASSERT_EQ(corpus.size(), g.entities) << seed;
    std::vector<std::string> seeds = {g.syscalls[seed % g.syscalls.size()]};
    const FocusedSet set = Focus(corpus, seeds);
    const auto names = set.Names();
    EXPECT_EQ(testing::CheckFocused(g, names, seeds), std::nullopt) << "seed " << seed;
    for (const auto &n : names) {
      if (!g.roles.count(n) || n == seeds[0] || n == "mmap" || n == "syz_execute_func") continue;
      auto fewer = names;
      fewer.erase(n);
      EXPECT_NE(testing::CheckFocused(g, fewer, seeds), std::nullopt)
          << "seed " << seed << ": " << n << " is redundant";
    }
  }
}

class FixedSnapshots : public SnapshotSource {
 public:
  std::map<std::string, std::shared_ptr<const DescriptionCorpus>> by_commit;
  std::shared_ptr<const DescriptionCorpus> SnapshotAt(std::string_view c) const override {
    return by_commit.at(std::string(c));
  }
};

TEST(SyzlangRelevantTest, OnlyClosureChangesCount) {
  // f0 (oldest) .. f4 (newest).
  const CommitAxis axis(AxisKind::kFuzzer, testing::DailyCommits(SyzbotStart(), 5, "f"));
  const std::string base = std::string(testing::kInoutExample) + testing::kMandatoryStubs;
  std::vector<FileVersion> versions = {
      {"sys/a.txt", "f0", std::string(testing::kMandatoryStubs)},
      {"sys/b.txt", "f1", std::string(testing::kInoutExample)},
      {"sys/c.txt", "f2", std::string("unrelated(x int32)\n")},
      {"sys/b.txt", "f3",
       std::string(testing::kInoutExample) + "\nextra_call(x ptr[in, child])\n"},
      {"sys/b.txt", "f4",
       std::string("resource my_resource[intptr]\nproducer(num int64) my_resource\n"
                   "consumer(p ptr[inout, parent])\nparent {\n\tchild\tchild\t(in)\n}\n"
                   "child {\n\trec\tmy_resource\n}\n")}};
  const DescriptionHistory history(axis, versions, false);
  const std::vector<std::string> calls = {"consumer"};
  const CommitAxis relevant = RelevantDescriptionCommits(axis, history, calls);
  std::vector<std::string> ids;
  for (const auto &c : relevant.commits()) ids.push_back(c.id);
  // f3 adds an unrelated syscall; f4 changes producer's argument.
  EXPECT_EQ(ids, (std::vector<std::string>{"f4", "f1"}));

  const std::vector<std::string> absent = {"never_there"};
  EXPECT_EQ(CodeOf([&] { RelevantDescriptionCommits(axis, history, absent); }),
            ErrorCode::kNeverDescribable);
}

TEST(SyzlangRelevantTest, SnapshotsShareUnchangedVersions) {
  const CommitAxis axis(AxisKind::kFuzzer, testing::DailyCommits(SyzbotStart(), 4, "f"));
  std::vector<FileVersion> versions = {{"a.txt", "f0", std::string(testing::kInoutExample)},
                                       {"b.txt", "f2", std::string(testing::kMandatoryStubs)},
                                       {"b.txt", "f3", std::nullopt}};
  const DescriptionHistory history(axis, versions, false);
  EXPECT_EQ(history.SnapshotAt("f0"), history.SnapshotAt("f1"));
  EXPECT_NE(history.SnapshotAt("f1"), history.SnapshotAt("f2"));
  EXPECT_EQ(history.SnapshotAt("f2")->Find("mmap")->kind, EntityKind::kSyscall);
  EXPECT_EQ(history.SnapshotAt("f3")->Find("mmap"), nullptr);
  EXPECT_EQ(history.SnapshotAt("f3")->size(), history.SnapshotAt("f0")->size());
}

}  // namespace
}  // namespace retro
