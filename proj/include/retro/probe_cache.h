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

#ifndef RETRO_PROBE_CACHE_H_
#define RETRO_PROBE_CACHE_H_

// Session memo shared by all bugs of a campaign. Optionally backed by an
// append-only log so interrupted campaigns resume without re-fuzzing.
//
// Log format: the header line "retro-cache v1", then one JSON object per
// line: {"k": key, "o": outcome}. Later lines win. A torn final line is
// ignored.

#include <cstddef>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "retro/oracle.h"

namespace retro {

inline constexpr std::string_view kCacheHeader = "retro-cache v1";

struct ProbeKey {
  std::string bug;
  std::string target;
  std::string fuzzer;
  std::string focused_set;
  // Distinguishes budgets: p (frozen budget), r1 (retry), cN (calibration).
  std::string tag;

  std::string Encode() const;
  bool operator==(const ProbeKey &) const = default;
};

class ProbeCache {
 public:
  // In-memory only.
  ProbeCache() = default;
  ~ProbeCache();
  ProbeCache(const ProbeCache &) = delete;
  ProbeCache &operator=(const ProbeCache &) = delete;

  // Loads (or creates) the log at `path`. Throws kCacheVersion when the
  // header names another version and kIo when the file is unusable.
  static std::unique_ptr<ProbeCache> Open(const std::string &path);

  std::optional<SessionOutcome> Lookup(const ProbeKey &key) const;
  // Last write wins. Appends to the log when persistent.
  void Insert(const ProbeKey &key, const SessionOutcome &outcome);

  size_t size() const;
  // Lines in the log, including superseded ones.
  size_t log_records() const;
  const std::string &path() const { return path_; }
  std::map<std::string, SessionOutcome> Snapshot() const;

  // Rewrites the log with one line per live key.
  void Compact();
  // Drops every entry and truncates the log to its header.
  void Clear();

 private:
  void Rewrite(const std::map<std::string, SessionOutcome> &entries);

  mutable std::mutex mu_;
  std::map<std::string, SessionOutcome> entries_;
  std::string path_;
  std::FILE *log_ = nullptr;
  size_t log_records_ = 0;
};

}  // namespace retro

#endif  // RETRO_PROBE_CACHE_H_
