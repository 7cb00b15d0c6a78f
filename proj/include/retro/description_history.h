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

#ifndef RETRO_DESCRIPTION_HISTORY_H_
#define RETRO_DESCRIPTION_HISTORY_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/history.h"
#include "retro/syzlang.h"

namespace retro {

// One revision of a description file. `text == nullopt` deletes the file.
struct FileVersion {
  std::string path;
  std::string fuzzer_commit;
  std::optional<std::string> text;
};

// Description files versioned along the fuzzer axis. Each version is parsed
// once; snapshots with identical file versions share one corpus.
class DescriptionHistory : public SnapshotSource {
 public:
  // Throws kNotFound for a version at an unknown commit, kConflict for two
  // versions of one file at one commit and kParse for malformed text.
  DescriptionHistory(CommitAxis fuzzer_axis, std::vector<FileVersion> versions,
                     bool legacy_inout);

  // Throws kNotFound for an unknown commit. Thread-safe.
  std::shared_ptr<const DescriptionCorpus> SnapshotAt(
      std::string_view fuzzer_commit) const override;

  const CommitAxis &axis() const { return axis_; }
  std::span<const FileVersion> versions() const { return versions_; }
  bool legacy_inout() const { return legacy_inout_; }

  // Distinct snapshots built so far.
  size_t cached_snapshots() const;

 private:
  struct ParsedVersion {
    size_t axis_index;  // 0 is newest
    size_t version;     // index into versions_
    std::vector<EntityPtr> entities;
    bool deleted;
  };

  CommitAxis axis_;
  std::vector<FileVersion> versions_;
  bool legacy_inout_;
  // path -> versions ordered oldest first
  std::map<std::string, std::vector<ParsedVersion>> files_;

  mutable std::mutex mu_;
  mutable std::map<std::vector<long>, std::shared_ptr<const DescriptionCorpus>>
      snapshots_;
};

}  // namespace retro

#endif  // RETRO_DESCRIPTION_HISTORY_H_
