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

#include "retro/description_history.h"

#include <algorithm>

#include "retro/error.h"

namespace retro {

DescriptionHistory::DescriptionHistory(CommitAxis fuzzer_axis,
                                       std::vector<FileVersion> versions,
                                       bool legacy_inout)
    : axis_(std::move(fuzzer_axis)),
      versions_(std::move(versions)),
      legacy_inout_(legacy_inout) {
  for (size_t v = 0; v < versions_.size(); ++v) {
    const FileVersion &fv = versions_[v];
    ParsedVersion parsed;
    parsed.axis_index = axis_.RequireIndex(fv.fuzzer_commit);
    parsed.version = v;
    parsed.deleted = !fv.text.has_value();
    if (fv.text) {
      for (Entity &e : ParseEntities({fv.path, *fv.text}, fv.fuzzer_commit)) {
        parsed.entities.push_back(std::make_shared<const Entity>(std::move(e)));
      }
    }
    files_[fv.path].push_back(std::move(parsed));
  }
  for (auto &[path, list] : files_) {
    std::sort(list.begin(), list.end(),
              [](const ParsedVersion &a, const ParsedVersion &b) {
                return a.axis_index > b.axis_index;
              });
    for (size_t i = 1; i < list.size(); ++i) {
      if (list[i].axis_index == list[i - 1].axis_index) {
        Fail(ErrorCode::kConflict, "two versions of '" + path + "' at commit " +
                                       axis_.at(list[i].axis_index).id);
      }
    }
  }
}

std::shared_ptr<const DescriptionCorpus> DescriptionHistory::SnapshotAt(
    std::string_view fuzzer_commit) const {
  const size_t at = axis_.RequireIndex(fuzzer_commit);
  std::vector<long> key;
  key.reserve(files_.size());
  for (const auto &[path, list] : files_) {
    long chosen = -1;
    for (const ParsedVersion &pv : list) {
      if (pv.axis_index < at) break;
      chosen = static_cast<long>(pv.version);
    }
    key.push_back(chosen);
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = snapshots_.find(key);
    if (it != snapshots_.end()) return it->second;
  }
  std::vector<EntityPtr> entities;
  size_t k = 0;
  for (const auto &[path, list] : files_) {
    const long chosen = key[k++];
    if (chosen < 0) continue;
    for (const ParsedVersion &pv : list) {
      if (static_cast<long>(pv.version) != chosen) continue;
      entities.insert(entities.end(), pv.entities.begin(), pv.entities.end());
    }
  }
  auto corpus = std::make_shared<const DescriptionCorpus>(
      DescriptionCorpus::Build(std::move(entities), legacy_inout_));
  std::lock_guard<std::mutex> lock(mu_);
  return snapshots_.emplace(std::move(key), std::move(corpus)).first->second;
}

size_t DescriptionHistory::cached_snapshots() const {
  std::lock_guard<std::mutex> lock(mu_);
  return snapshots_.size();
}

}  // namespace retro
