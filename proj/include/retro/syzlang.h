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

#ifndef RETRO_SYZLANG_H_
#define RETRO_SYZLANG_H_

// A subset of the syscall description language: resources, syscalls,
// structs, unions, flag sets and (templated) type aliases, with
// direction attributes and comments. `define`, `include` and `incdir`
// lines are accepted and ignored.
//
//   resource fd_dev[fd]
//   open$dev(path ptr[in, string]) fd_dev
//   ioctl$dev(fd fd_dev, arg ptr[inout, dev_args])
//   dev_args {
//   	flags	flags[dev_flags, int32]
//   	out	fd_dev	(out)
//   }
//   dev_flags = 1, 2, 4

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retro/history.h"

namespace retro {

enum class EntityKind { kSyscall, kStruct, kUnion, kResource, kFlagset, kTypeAlias };
enum class Direction { kUnspecified, kIn, kOut, kInOut };
enum class ResourceRole { kProducer, kConsumer, kBoth };

std::string_view ToString(EntityKind kind);
std::string_view ToString(Direction direction);
std::string_view ToString(ResourceRole role);

struct TypeExpr {
  std::string head;
  bool literal = false;  // numbers, strings and ranges
  std::vector<TypeExpr> args;

  bool operator==(const TypeExpr &) const = default;
};

struct Member {
  std::string name;
  TypeExpr type;
  Direction direction = Direction::kUnspecified;
  std::vector<std::string> attrs;  // non-direction attributes, in order

  bool operator==(const Member &) const = default;
};

struct Entity {
  std::string name;
  EntityKind kind = EntityKind::kStruct;
  // Syscall arguments or struct/union fields.
  std::vector<Member> members;
  // Resource returned by a syscall.
  std::optional<std::string> produces;
  // Resource base type, or the body of a type alias.
  TypeExpr base;
  // Type alias template parameters.
  std::vector<std::string> params;
  // Flag values or resource special values.
  std::vector<std::string> values;
  // Trailing declaration attributes.
  std::vector<std::string> attrs;

  std::string source_path;
  int source_line = 0;
  std::string source_commit;

  bool operator==(const Entity &) const = default;
};

std::string PrintTypeExpr(const TypeExpr &type);
// Normalized single-declaration text, independent of source location.
std::string PrintEntity(const Entity &entity);

using EntityPtr = std::shared_ptr<const Entity>;

// Immutable parsed corpus with a precomputed resource-usage index.
class DescriptionCorpus {
 public:
  DescriptionCorpus() = default;
  // Throws kConflict on duplicate names. Unresolved references become
  // diagnostics.
  static DescriptionCorpus Build(std::vector<EntityPtr> entities,
                                 bool legacy_inout,
                                 std::vector<std::string> diagnostics = {});

  bool legacy_inout() const { return legacy_inout_; }
  const std::map<std::string, EntityPtr, std::less<>> &entities() const {
    return entities_;
  }
  size_t size() const { return entities_.size(); }
  const Entity *Find(std::string_view name) const;
  std::span<const std::string> diagnostics() const { return diagnostics_; }

  // Names directly referenced by `entity` (resolvable or not).
  std::vector<std::string> References(const Entity &entity) const;
  // Resource roles for an indexed syscall; nullptr if the syscall's
  // usage could not be resolved.
  const std::map<std::string, ResourceRole> *UsageOf(std::string_view syscall) const;
  // Syscalls producing (or consuming) `resource`, alphabetized.
  std::span<const std::string> ProducersOf(std::string_view resource) const;
  std::span<const std::string> ConsumersOf(std::string_view resource) const;

 private:
  bool legacy_inout_ = false;
  std::map<std::string, EntityPtr, std::less<>> entities_;
  std::vector<std::string> diagnostics_;
  std::map<std::string, std::map<std::string, ResourceRole>, std::less<>> usage_;
  std::map<std::string, std::vector<std::string>, std::less<>> producers_;
  std::map<std::string, std::vector<std::string>, std::less<>> consumers_;
};

struct SourceFile {
  std::string path;
  std::string text;
};

// Throws kParse (with path and line) on grammar errors and kConflict on
// duplicate declarations.
DescriptionCorpus ParseDescriptions(std::span<const SourceFile> sources,
                                    bool legacy_inout,
                                    std::string_view source_commit = {});
// Parses one file into entities without building a corpus.
std::vector<Entity> ParseEntities(const SourceFile &source,
                                  std::string_view source_commit = {});

// Walks `call`'s argument types. A resource seen only under `in` is
// consumed, only under `out` produced; an `inout` context yields both. In
// legacy mode everything below an `inout` pointer is both; otherwise members
// carry their own direction. The return resource is produced. Throws
// kResolution naming the first unresolved symbol.
std::map<std::string, ResourceRole> ResourceUsage(
    const Entity &call, const DescriptionCorpus &corpus,
    std::vector<std::string> *diagnostics = nullptr);

inline const std::vector<std::string> &DefaultMandatoryCalls() {
  static const std::vector<std::string> calls = {"mmap", "syz_execute_func"};
  return calls;
}

struct FocusOptions {
  std::vector<std::string> mandatory_calls = DefaultMandatoryCalls();
};

// A closed subset of a corpus. Entities are shared with the corpus and
// never modified.
struct FocusedSet {
  std::vector<std::string> seed_calls;
  std::vector<std::string> mandatory_calls;
  std::map<std::string, EntityPtr, std::less<>> entities;

  bool Contains(std::string_view name) const {
    return entities.find(name) != entities.end();
  }
  std::set<std::string> Names() const;
  // Normalized text: resources, then types, then syscalls, each
  // alphabetized. Parses back to the same entities.
  std::string Render() const;
  // Hex digest of Render(); independent of insertion order.
  std::string Hash() const;
};

// Selects seeds, mandatory calls, their transitive references and, for
// every resource lacking a producer or consumer, one partner syscall
// (fewest new resources first, then by name), to a fixed point. Partners
// made redundant by later additions are pruned. Throws kNotFound for an
// unknown seed, kCorpusIncomplete for a missing mandatory call and
// kUnsatisfiableResource when no partner exists.
FocusedSet Focus(const DescriptionCorpus &corpus,
                 std::span<const std::string> reproducer_calls,
                 const FocusOptions &options = {});

// Independent closure check used by tests and sanity checks: every
// reference resolves inside the set, every resource in the set has a
// producer and a consumer among its syscalls, seeds and mandatory calls are
// present. Returns the first violation, or nullopt.
std::optional<std::string> ValidateFocusedSet(
    const DescriptionCorpus &corpus, const std::set<std::string> &names,
    std::span<const std::string> seeds, std::span<const std::string> mandatory);

// Source of description snapshots keyed by fuzzer commit. Implementations
// return the same pointer for commits whose snapshot is unchanged.
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual std::shared_ptr<const DescriptionCorpus> SnapshotAt(
      std::string_view fuzzer_commit) const = 0;
};

// Entity names that focusing would select in `corpus` for the subset of
// `calls` it describes. Falls back to the reference closure when focusing
// fails. Empty when no call is described.
std::set<std::string> FocusedClosure(const DescriptionCorpus &corpus,
                                     std::span<const std::string> calls,
                                     const FocusOptions &options = {});

// Description axis of fuzzer commits at which an entity of the focused
// closure first appears or its normalized text changes. Throws
// kNeverDescribable if some call is absent from every snapshot.
CommitAxis RelevantDescriptionCommits(const CommitAxis &fuzzer_axis,
                                      const SnapshotSource &snapshots,
                                      std::span<const std::string> calls,
                                      const FocusOptions &options = {});

}  // namespace retro

#endif  // RETRO_SYZLANG_H_
