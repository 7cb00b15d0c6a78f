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

#include "retro/syzlang.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <iomanip>
#include <sstream>

#include "retro/error.h"
#include "retro/rng.h"

namespace retro {
namespace {

// How a builtin type constructor treats its arguments.
enum class Builtin {
  kNone,         // not a builtin: a reference whose args are type arguments
  kPointer,      // ptr[dir, T, ...]: only T is a type
  kSkipFirst,    // len[path, T], const[VALUE, T], fmt[format, T]
  kChecksum,     // csum[path, kind, T]
  kOpaque,       // no type arguments
  kTransparent,  // every argument is a type (literals skipped)
};

Builtin Classify(std::string_view head) {
  static const std::map<std::string_view, Builtin> kBuiltins = {
      {"ptr", Builtin::kPointer},       {"ptr64", Builtin::kPointer},
      {"len", Builtin::kSkipFirst},     {"bytesize", Builtin::kSkipFirst},
      {"bytesize2", Builtin::kSkipFirst}, {"bytesize4", Builtin::kSkipFirst},
      {"bytesize8", Builtin::kSkipFirst}, {"bitsize", Builtin::kSkipFirst},
      {"offsetof", Builtin::kSkipFirst}, {"const", Builtin::kSkipFirst},
      {"fmt", Builtin::kSkipFirst},     {"csum", Builtin::kChecksum},
      {"int8", Builtin::kOpaque},       {"int16", Builtin::kOpaque},
      {"int32", Builtin::kOpaque},      {"int64", Builtin::kOpaque},
      {"intptr", Builtin::kOpaque},     {"int16be", Builtin::kOpaque},
      {"int32be", Builtin::kOpaque},    {"int64be", Builtin::kOpaque},
      {"bool8", Builtin::kOpaque},      {"bool16", Builtin::kOpaque},
      {"bool32", Builtin::kOpaque},     {"bool64", Builtin::kOpaque},
      {"text", Builtin::kOpaque},       {"vma", Builtin::kOpaque},
      {"vma64", Builtin::kOpaque},      {"proc", Builtin::kOpaque},
      {"glob", Builtin::kOpaque},       {"void", Builtin::kOpaque},
      {"filename", Builtin::kOpaque},   {"buffer", Builtin::kOpaque},
      {"compressed_image", Builtin::kOpaque},
      {"array", Builtin::kTransparent}, {"optional", Builtin::kTransparent},
      {"string", Builtin::kTransparent}, {"stringnoz", Builtin::kTransparent},
      {"flags", Builtin::kTransparent},
  };
  auto it = kBuiltins.find(head);
  return it == kBuiltins.end() ? Builtin::kNone : it->second;
}

bool IsParam(const std::vector<std::string> *params, std::string_view name) {
  return params != nullptr &&
         std::find(params->begin(), params->end(), name) != params->end();
}

// Calls `fn` on the arguments of `t` that occupy type positions.
template <typename Fn>
void ForEachTypeArg(const TypeExpr &t, Fn &&fn) {
  const Builtin b = Classify(t.head);
  size_t first = 0;
  size_t last = t.args.size();
  switch (b) {
    case Builtin::kOpaque: return;
    case Builtin::kPointer: first = 1; last = std::min<size_t>(2, last); break;
    case Builtin::kSkipFirst: first = 1; break;
    case Builtin::kChecksum: first = 2; break;
    case Builtin::kNone:
    case Builtin::kTransparent: break;
  }
  for (size_t i = first; i < last; ++i) fn(t.args[i]);
}

void CollectRefs(const TypeExpr &t, const std::vector<std::string> *params,
                 std::vector<std::string> &out) {
  if (t.literal || IsParam(params, t.head)) return;
  if (Classify(t.head) == Builtin::kNone &&
      std::find(out.begin(), out.end(), t.head) == out.end()) {
    out.push_back(t.head);
  }
  ForEachTypeArg(t, [&](const TypeExpr &a) { CollectRefs(a, params, out); });
}

ResourceRole RoleFor(Direction d) {
  switch (d) {
    case Direction::kOut: return ResourceRole::kProducer;
    case Direction::kInOut: return ResourceRole::kBoth;
    case Direction::kIn:
    case Direction::kUnspecified: return ResourceRole::kConsumer;
  }
  return ResourceRole::kConsumer;
}

Direction ParseDirection(const TypeExpr &t) {
  if (t.head == "in") return Direction::kIn;
  if (t.head == "out") return Direction::kOut;
  if (t.head == "inout") return Direction::kInOut;
  return Direction::kUnspecified;
}

class UsageWalker {
 public:
  UsageWalker(const DescriptionCorpus &corpus, std::vector<std::string> *diagnostics,
              std::string_view call)
      : corpus_(corpus), diagnostics_(diagnostics), call_(call) {}

  void Walk(const TypeExpr &t, Direction dir,
            const std::vector<std::string> *params) {
    if (t.literal || IsParam(params, t.head)) return;
    const Builtin b = Classify(t.head);
    if (b == Builtin::kPointer) {
      if (t.args.size() < 2) return;
      Direction pointee = ParseDirection(t.args[0]);
      if (pointee == Direction::kUnspecified) pointee = dir;
      if (corpus_.legacy_inout() && dir == Direction::kInOut) {
        pointee = Direction::kInOut;
      }
      Walk(t.args[1], pointee, params);
      return;
    }
    if (b != Builtin::kNone) {
      ForEachTypeArg(t, [&](const TypeExpr &a) { Walk(a, dir, params); });
      return;
    }
    const Entity *e = corpus_.Find(t.head);
    if (e == nullptr) {
      Fail(ErrorCode::kResolution, "unresolved symbol '" + t.head +
                                       "' reached from '" + std::string(call_) +
                                       "'");
    }
    switch (e->kind) {
      case EntityKind::kResource:
        Record(e->name, dir);
        return;
      case EntityKind::kFlagset:
        return;
      case EntityKind::kSyscall:
        Fail(ErrorCode::kResolution,
             "syscall '" + e->name + "' used as a type in '" +
                 std::string(call_) + "'");
      case EntityKind::kStruct:
      case EntityKind::kUnion:
        if (!visited_.emplace(e->name, dir).second) return;
        for (const Member &m : e->members) {
          Direction md = m.direction == Direction::kUnspecified ? dir : m.direction;
          if (corpus_.legacy_inout() && dir == Direction::kInOut) {
            md = Direction::kInOut;
          }
          Walk(m.type, md, nullptr);
        }
        return;
      case EntityKind::kTypeAlias:
        if (!e->params.empty()) {
          for (const TypeExpr &a : t.args) {
            const Entity *arg = a.literal ? nullptr : corpus_.Find(a.head);
            if (arg != nullptr && arg->kind == EntityKind::kResource &&
                diagnostics_ != nullptr) {
              diagnostics_->push_back(
                  "resource '" + arg->name + "' passed as template argument to '" +
                  e->name + "' in '" + std::string(call_) +
                  "'; using the enclosing direction");
            }
            Walk(a, dir, params);
          }
        }
        if (!visited_.emplace(e->name, dir).second) return;
        Walk(e->base, dir, &e->params);
        return;
    }
  }

  void Record(const std::string &resource, Direction dir) {
    const ResourceRole role = RoleFor(dir);
    auto [it, inserted] = roles_.emplace(resource, role);
    if (!inserted && it->second != role) it->second = ResourceRole::kBoth;
  }

  std::map<std::string, ResourceRole> Take() { return std::move(roles_); }

 private:
  const DescriptionCorpus &corpus_;
  std::vector<std::string> *diagnostics_;
  std::string_view call_;
  std::set<std::pair<std::string, Direction>> visited_;
  std::map<std::string, ResourceRole> roles_;
};

const std::vector<std::string> kEmpty;

bool Produces(ResourceRole role) { return role != ResourceRole::kConsumer; }
bool Consumes(ResourceRole role) { return role != ResourceRole::kProducer; }

// Transitive reference closure of `roots` within `corpus`.
std::set<std::string> ReferenceClosure(const DescriptionCorpus &corpus,
                                       const std::set<std::string> &roots,
                                       bool strict) {
  std::set<std::string> out;
  std::deque<std::string> queue;
  for (const std::string &r : roots) {
    if (corpus.Find(r) != nullptr && out.insert(r).second) queue.push_back(r);
  }
  while (!queue.empty()) {
    const std::string name = std::move(queue.front());
    queue.pop_front();
    for (const std::string &ref : corpus.References(*corpus.Find(name))) {
      if (corpus.Find(ref) == nullptr) {
        if (strict) {
          Fail(ErrorCode::kResolution,
               "'" + ref + "' referenced by '" + name + "' is unresolved");
        }
        continue;
      }
      if (out.insert(ref).second) queue.push_back(ref);
    }
  }
  return out;
}

}  // namespace

std::string_view ToString(EntityKind kind) {
  switch (kind) {
    case EntityKind::kSyscall: return "syscall";
    case EntityKind::kStruct: return "struct";
    case EntityKind::kUnion: return "union";
    case EntityKind::kResource: return "resource";
    case EntityKind::kFlagset: return "flagset";
    case EntityKind::kTypeAlias: return "typealias";
  }
  return "struct";
}

std::string_view ToString(Direction direction) {
  switch (direction) {
    case Direction::kUnspecified: return "unspecified";
    case Direction::kIn: return "in";
    case Direction::kOut: return "out";
    case Direction::kInOut: return "inout";
  }
  return "unspecified";
}

std::string_view ToString(ResourceRole role) {
  switch (role) {
    case ResourceRole::kProducer: return "producer";
    case ResourceRole::kConsumer: return "consumer";
    case ResourceRole::kBoth: return "both";
  }
  return "both";
}

DescriptionCorpus DescriptionCorpus::Build(std::vector<EntityPtr> entities,
                                           bool legacy_inout,
                                           std::vector<std::string> diagnostics) {
  DescriptionCorpus corpus;
  corpus.legacy_inout_ = legacy_inout;
  corpus.diagnostics_ = std::move(diagnostics);
  for (EntityPtr &e : entities) {
    auto [it, inserted] = corpus.entities_.emplace(e->name, e);
    if (!inserted) {
      const Entity &first = *it->second;
      Fail(ErrorCode::kConflict,
           e->source_path + ":" + std::to_string(e->source_line) +
               ": duplicate declaration of '" + e->name + "' (first at " +
               first.source_path + ":" + std::to_string(first.source_line) + ")");
    }
  }
  for (const auto &[name, e] : corpus.entities_) {
    for (const std::string &ref : corpus.References(*e)) {
      if (corpus.Find(ref) == nullptr) {
        corpus.diagnostics_.push_back(e->source_path + ":" +
                                      std::to_string(e->source_line) +
                                      ": unresolved reference '" + ref +
                                      "' in '" + name + "'");
      }
    }
  }
  for (const auto &[name, e] : corpus.entities_) {
    if (e->kind != EntityKind::kSyscall) continue;
    try {
      auto usage = ResourceUsage(*e, corpus, &corpus.diagnostics_);
      for (const auto &[resource, role] : usage) {
        if (Produces(role)) corpus.producers_[resource].push_back(name);
        if (Consumes(role)) corpus.consumers_[resource].push_back(name);
      }
      corpus.usage_.emplace(name, std::move(usage));
    } catch (const Error &err) {
      if (err.code() != ErrorCode::kResolution) throw;
      corpus.diagnostics_.push_back(err.what());
    }
  }
  return corpus;
}

const Entity *DescriptionCorpus::Find(std::string_view name) const {
  auto it = entities_.find(name);
  return it == entities_.end() ? nullptr : it->second.get();
}

std::vector<std::string> DescriptionCorpus::References(const Entity &e) const {
  std::vector<std::string> refs;
  switch (e.kind) {
    case EntityKind::kSyscall:
    case EntityKind::kStruct:
    case EntityKind::kUnion:
      for (const Member &m : e.members) CollectRefs(m.type, nullptr, refs);
      if (e.produces &&
          std::find(refs.begin(), refs.end(), *e.produces) == refs.end()) {
        refs.push_back(*e.produces);
      }
      break;
    case EntityKind::kResource:
      CollectRefs(e.base, nullptr, refs);
      break;
    case EntityKind::kTypeAlias:
      CollectRefs(e.base, &e.params, refs);
      break;
    case EntityKind::kFlagset:
      break;
  }
  return refs;
}

const std::map<std::string, ResourceRole> *DescriptionCorpus::UsageOf(
    std::string_view syscall) const {
  auto it = usage_.find(syscall);
  return it == usage_.end() ? nullptr : &it->second;
}

std::span<const std::string> DescriptionCorpus::ProducersOf(
    std::string_view resource) const {
  auto it = producers_.find(resource);
  return it == producers_.end() ? std::span<const std::string>(kEmpty)
                                : std::span<const std::string>(it->second);
}

std::span<const std::string> DescriptionCorpus::ConsumersOf(
    std::string_view resource) const {
  auto it = consumers_.find(resource);
  return it == consumers_.end() ? std::span<const std::string>(kEmpty)
                                : std::span<const std::string>(it->second);
}

std::map<std::string, ResourceRole> ResourceUsage(
    const Entity &call, const DescriptionCorpus &corpus,
    std::vector<std::string> *diagnostics) {
  if (call.kind != EntityKind::kSyscall) {
    Fail(ErrorCode::kArgument, "'" + call.name + "' is not a syscall");
  }
  UsageWalker walker(corpus, diagnostics, call.name);
  for (const Member &arg : call.members) {
    walker.Walk(arg.type,
                arg.direction == Direction::kUnspecified ? Direction::kIn
                                                         : arg.direction,
                nullptr);
  }
  if (call.produces) {
    const Entity *ret = corpus.Find(*call.produces);
    if (ret == nullptr) {
      Fail(ErrorCode::kResolution, "unresolved symbol '" + *call.produces +
                                       "' returned by '" + call.name + "'");
    }
    if (ret->kind == EntityKind::kResource) {
      walker.Record(ret->name, Direction::kOut);
    }
  }
  return walker.Take();
}

std::set<std::string> FocusedSet::Names() const {
  std::set<std::string> names;
  for (const auto &[name, e] : entities) names.insert(name);
  return names;
}

std::string FocusedSet::Render() const {
  auto group = [](EntityKind kind) {
    switch (kind) {
      case EntityKind::kResource: return 0;
      case EntityKind::kSyscall: return 2;
      default: return 1;
    }
  };
  std::string out;
  for (int g = 0; g < 3; ++g) {
    for (const auto &[name, e] : entities) {
      if (group(e->kind) == g) out += PrintEntity(*e) + "\n";
    }
  }
  return out;
}

std::string FocusedSet::Hash() const {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << Fnv1a(Render());
  return hex.str();
}

std::optional<std::string> ValidateFocusedSet(
    const DescriptionCorpus &corpus, const std::set<std::string> &names,
    std::span<const std::string> seeds, std::span<const std::string> mandatory) {
  for (const std::string &s : seeds) {
    if (!names.contains(s)) return "seed '" + s + "' missing";
  }
  for (const std::string &m : mandatory) {
    if (!names.contains(m)) return "mandatory call '" + m + "' missing";
  }
  std::set<std::string> produced;
  std::set<std::string> consumed;
  for (const std::string &name : names) {
    const Entity *e = corpus.Find(name);
    if (e == nullptr) return "'" + name + "' not in corpus";
    for (const std::string &ref : corpus.References(*e)) {
      if (!names.contains(ref)) {
        return "'" + name + "' references '" + ref + "' outside the set";
      }
    }
    if (e->kind != EntityKind::kSyscall) continue;
    const auto *usage = corpus.UsageOf(name);
    if (usage == nullptr) return "usage of '" + name + "' is unresolved";
    for (const auto &[resource, role] : *usage) {
      if (Produces(role)) produced.insert(resource);
      if (Consumes(role)) consumed.insert(resource);
    }
  }
  for (const std::string &name : names) {
    if (corpus.Find(name)->kind != EntityKind::kResource) continue;
    if (!produced.contains(name)) return "resource '" + name + "' has no producer";
    if (!consumed.contains(name)) return "resource '" + name + "' has no consumer";
  }
  return std::nullopt;
}

FocusedSet Focus(const DescriptionCorpus &corpus,
                 std::span<const std::string> reproducer_calls,
                 const FocusOptions &options) {
  std::set<std::string> roots;
  for (const std::string &call : reproducer_calls) {
    const Entity *e = corpus.Find(call);
    if (e == nullptr || e->kind != EntityKind::kSyscall) {
      Fail(ErrorCode::kNotFound, "reproducer call '" + call + "' is not described");
    }
    roots.insert(call);
  }
  for (const std::string &call : options.mandatory_calls) {
    const Entity *e = corpus.Find(call);
    if (e == nullptr || e->kind != EntityKind::kSyscall) {
      Fail(ErrorCode::kCorpusIncomplete,
           "mandatory call '" + call + "' missing from the corpus");
    }
    roots.insert(call);
  }

  std::set<std::string> selected = ReferenceClosure(corpus, roots, true);
  std::vector<std::string> partners;

  auto missing_partner = [&]() -> std::optional<std::string> {
    std::set<std::string> produced;
    std::set<std::string> consumed;
    for (const std::string &name : selected) {
      if (corpus.Find(name)->kind != EntityKind::kSyscall) continue;
      const auto *usage = corpus.UsageOf(name);
      if (usage == nullptr) {
        Fail(ErrorCode::kResolution, "usage of '" + name + "' is unresolved");
      }
      for (const auto &[resource, role] : *usage) {
        if (Produces(role)) produced.insert(resource);
        if (Consumes(role)) consumed.insert(resource);
      }
    }
    for (const std::string &name : selected) {
      if (corpus.Find(name)->kind != EntityKind::kResource) continue;
      for (const bool want_producer : {true, false}) {
        if ((want_producer ? produced : consumed).contains(name)) continue;
        const auto candidates =
            want_producer ? corpus.ProducersOf(name) : corpus.ConsumersOf(name);
        if (candidates.empty()) {
          Fail(ErrorCode::kUnsatisfiableResource,
               "no syscall in the corpus " +
                   std::string(want_producer ? "produces" : "consumes") +
                   " resource '" + name + "'");
        }
        const std::string *best = nullptr;
        size_t best_new = 0;
        for (const std::string &candidate : candidates) {
          size_t fresh = 0;
          for (const auto &[resource, role] : *corpus.UsageOf(candidate)) {
            if (!selected.contains(resource)) ++fresh;
          }
          // Candidates are alphabetized, so the first minimum wins ties.
          if (best == nullptr || fresh < best_new) {
            best = &candidate;
            best_new = fresh;
          }
        }
        return *best;
      }
    }
    return std::nullopt;
  };

  while (auto partner = missing_partner()) {
    partners.push_back(*partner);
    std::set<std::string> grown = selected;
    grown.insert(*partner);
    selected = ReferenceClosure(corpus, grown, true);
  }

  // Drop partners that later additions made redundant, newest first.
  for (bool removed = true; removed;) {
    removed = false;
    for (auto it = partners.rbegin(); it != partners.rend(); ++it) {
      std::set<std::string> without = selected;
      without.erase(*it);
      if (ValidateFocusedSet(corpus, without, reproducer_calls,
                             options.mandatory_calls)) {
        continue;
      }
      partners.erase(std::next(it).base());
      std::set<std::string> keep = roots;
      keep.insert(partners.begin(), partners.end());
      selected = ReferenceClosure(corpus, keep, true);
      removed = true;
      break;
    }
  }

  FocusedSet out;
  out.seed_calls.assign(reproducer_calls.begin(), reproducer_calls.end());
  out.mandatory_calls = options.mandatory_calls;
  for (const std::string &name : selected) {
    out.entities.emplace(name, corpus.entities().find(name)->second);
  }
  return out;
}

std::set<std::string> FocusedClosure(const DescriptionCorpus &corpus,
                                     std::span<const std::string> calls,
                                     const FocusOptions &options) {
  std::vector<std::string> present;
  for (const std::string &call : calls) {
    const Entity *e = corpus.Find(call);
    if (e != nullptr && e->kind == EntityKind::kSyscall) present.push_back(call);
  }
  if (present.empty()) return {};
  try {
    return Focus(corpus, present, options).Names();
  } catch (const Error &) {
    std::set<std::string> roots(present.begin(), present.end());
    for (const std::string &m : options.mandatory_calls) roots.insert(m);
    return ReferenceClosure(corpus, roots, false);
  }
}

namespace {

// What a focused closure depends on. When none of it differs in the next
// snapshot the closure is unchanged and need not be recomputed.
struct ClosureInputs {
  std::vector<bool> present;
  std::vector<std::pair<std::string, EntityPtr>> entities;
  std::vector<std::pair<std::string, std::vector<std::string>>> producers;
  std::vector<std::pair<std::string, std::vector<std::string>>> consumers;
  std::vector<std::pair<std::string, std::map<std::string, ResourceRole>>> usages;
};

EntityPtr Lookup(const DescriptionCorpus &corpus, std::string_view name) {
  auto it = corpus.entities().find(name);
  return it == corpus.entities().end() ? nullptr : it->second;
}

std::vector<bool> Presence(const DescriptionCorpus &corpus,
                           std::span<const std::string> calls) {
  std::vector<bool> out;
  for (const std::string &call : calls) {
    const Entity *e = corpus.Find(call);
    out.push_back(e != nullptr && e->kind == EntityKind::kSyscall);
  }
  return out;
}

ClosureInputs CaptureInputs(const DescriptionCorpus &corpus,
                            std::span<const std::string> calls,
                            const FocusOptions &options,
                            const std::set<std::string> &closure) {
  ClosureInputs in;
  in.present = Presence(corpus, calls);
  std::set<std::string> names = closure;
  names.insert(options.mandatory_calls.begin(), options.mandatory_calls.end());
  std::set<std::string> candidates;
  for (const std::string &name : names) {
    EntityPtr e = Lookup(corpus, name);
    in.entities.emplace_back(name, e);
    if (e == nullptr || e->kind != EntityKind::kResource) continue;
    auto p = corpus.ProducersOf(name);
    auto c = corpus.ConsumersOf(name);
    in.producers.emplace_back(name, std::vector<std::string>(p.begin(), p.end()));
    in.consumers.emplace_back(name, std::vector<std::string>(c.begin(), c.end()));
    candidates.insert(p.begin(), p.end());
    candidates.insert(c.begin(), c.end());
  }
  for (const std::string &cand : candidates) {
    if (names.contains(cand)) continue;
    const auto *usage = corpus.UsageOf(cand);
    in.usages.emplace_back(cand, usage ? *usage : std::map<std::string, ResourceRole>{});
  }
  return in;
}

bool InputsUnchanged(const ClosureInputs &in, const DescriptionCorpus &corpus,
                     std::span<const std::string> calls) {
  if (Presence(corpus, calls) != in.present) return false;
  for (const auto &[name, e] : in.entities) {
    if (Lookup(corpus, name) != e) return false;
  }
  auto same_list = [](std::span<const std::string> now,
                      const std::vector<std::string> &before) {
    return std::equal(now.begin(), now.end(), before.begin(), before.end());
  };
  for (const auto &[name, list] : in.producers) {
    if (!same_list(corpus.ProducersOf(name), list)) return false;
  }
  for (const auto &[name, list] : in.consumers) {
    if (!same_list(corpus.ConsumersOf(name), list)) return false;
  }
  for (const auto &[name, usage] : in.usages) {
    const auto *now = corpus.UsageOf(name);
    if (now == nullptr ? !usage.empty() : *now != usage) return false;
  }
  return true;
}

}  // namespace

CommitAxis RelevantDescriptionCommits(const CommitAxis &fuzzer_axis,
                                      const SnapshotSource &snapshots,
                                      std::span<const std::string> calls,
                                      const FocusOptions &options) {
  std::vector<bool> ever_present(calls.size(), false);
  std::set<std::string, std::less<>> relevant;
  std::shared_ptr<const DescriptionCorpus> previous;
  std::optional<ClosureInputs> inputs;
  for (size_t i = fuzzer_axis.size(); i-- > 0;) {
    const Commit &commit = fuzzer_axis.at(i);
    auto snapshot = snapshots.SnapshotAt(commit.id);
    if (snapshot == nullptr || snapshot == previous) continue;
    if (inputs && InputsUnchanged(*inputs, *snapshot, calls)) {
      previous = std::move(snapshot);
      continue;
    }
    for (size_t k = 0; k < calls.size(); ++k) {
      if (snapshot->Find(calls[k]) != nullptr) ever_present[k] = true;
    }
    const std::set<std::string> closure = FocusedClosure(*snapshot, calls, options);
    bool changed = false;
    for (const std::string &name : closure) {
      const Entity *now = snapshot->Find(name);
      const Entity *before = previous ? previous->Find(name) : nullptr;
      if (before == nullptr || PrintEntity(*before) != PrintEntity(*now)) {
        changed = true;
        break;
      }
    }
    if (changed) relevant.insert(commit.id);
    inputs = CaptureInputs(*snapshot, calls, options, closure);
    previous = std::move(snapshot);
  }
  for (size_t k = 0; k < calls.size(); ++k) {
    if (!ever_present[k]) {
      Fail(ErrorCode::kNeverDescribable,
           "call '" + calls[k] + "' is absent from every description snapshot");
    }
  }
  return FilterAxis(fuzzer_axis, AxisKind::kDescription, [&](const Commit &c) {
    return relevant.contains(c.id);
  });
}

}  // namespace retro
