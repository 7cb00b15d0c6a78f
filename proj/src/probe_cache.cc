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

#include "retro/probe_cache.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "retro/error.h"
#include "retro/serialization.h"
#include "retro/strings.h"

namespace retro {

std::string ProbeKey::Encode() const {
  return bug + "|" + target + "|" + fuzzer + "|" + focused_set + "|" + tag;
}

ProbeCache::~ProbeCache() {
  if (log_ != nullptr) std::fclose(log_);
}

std::unique_ptr<ProbeCache> ProbeCache::Open(const std::string &path) {
  auto cache = std::make_unique<ProbeCache>();
  cache->path_ = path;
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    const std::string text = ReadFile(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCacheHeader) {
      const std::string found = line.empty() ? "no header" : "'" + line + "'";
      Fail(ErrorCode::kCacheVersion,
           "cache " + path + " has " + found + ", expected '" +
               std::string(kCacheHeader) +
               "'; move it aside or run 'retro cache clear --cache " + path +
               "' to start a fresh v1 log");
    }
    const bool complete = !text.empty() && text.back() == '\n';
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    for (size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      Json j;
      try {
        j = Json::parse(lines[i]);
        cache->entries_[j.at("k").get<std::string>()] = j.at("o").get<SessionOutcome>();
        ++cache->log_records_;
      } catch (const std::exception &e) {
        if (i + 1 == lines.size() && !complete) break;
        Fail(ErrorCode::kIo, "cache " + path + ": corrupt record at line " +
                                 std::to_string(i + 2) + ": " + e.what());
      }
    }
    if (!complete && !lines.empty()) {
      // Drop the torn tail before appending.
      cache->Rewrite(cache->entries_);
    }
  } else {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    WriteFile(path, std::string(kCacheHeader) + "\n");
  }
  if (cache->log_ == nullptr) cache->log_ = std::fopen(path.c_str(), "ab");
  if (cache->log_ == nullptr) Fail(ErrorCode::kIo, "cannot append to cache " + path);
  return cache;
}

std::optional<SessionOutcome> ProbeCache::Lookup(const ProbeKey &key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key.Encode());
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ProbeCache::Insert(const ProbeKey &key, const SessionOutcome &outcome) {
  const std::string k = key.Encode();
  std::string line;
  if (log_ != nullptr) line = Json{{"k", k}, {"o", outcome}}.dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  entries_[k] = outcome;
  if (log_ != nullptr) {
    if (std::fwrite(line.data(), 1, line.size(), log_) != line.size() ||
        std::fflush(log_) != 0) {
      Fail(ErrorCode::kIo, "cannot append to cache " + path_);
    }
    ++log_records_;
  }
}

size_t ProbeCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

size_t ProbeCache::log_records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_records_;
}

std::map<std::string, SessionOutcome> ProbeCache::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

void ProbeCache::Rewrite(const std::map<std::string, SessionOutcome> &entries) {
  if (path_.empty()) return;
  if (log_ != nullptr) {
    std::fclose(log_);
    log_ = nullptr;
  }
  std::string text = std::string(kCacheHeader) + "\n";
  for (const auto &[k, o] : entries) text += Json{{"k", k}, {"o", o}}.dump() + "\n";
  const std::string tmp = path_ + ".tmp";
  WriteFile(tmp, text);
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot replace cache " + path_ + ": " + ec.message());
  log_records_ = entries.size();
  log_ = std::fopen(path_.c_str(), "ab");
  if (log_ == nullptr) Fail(ErrorCode::kIo, "cannot append to cache " + path_);
}

void ProbeCache::Compact() {
  std::lock_guard<std::mutex> lock(mu_);
  Rewrite(entries_);
}

void ProbeCache::Clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
  Rewrite(entries_);
}

}  // namespace retro
