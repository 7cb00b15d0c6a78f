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

#ifndef RETRO_BISECT_H_
#define RETRO_BISECT_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace retro {

enum class ProbeVerdict { kSuccess, kFailure, kUnstable };

struct BisectResult {
  // Indexes into the candidate sequence, 0 being the newest.
  size_t earliest_success = 0;
  // earliest_success + 1, unless every candidate succeeded.
  std::optional<size_t> latest_failure;
  // Set when every candidate between the bounds was unstable; the reveal
  // then lies somewhere in (earliest_success, latest_failure].
  bool unstable_range = false;
  std::vector<size_t> unstable;  // unstable indexes seen, ascending
  int probes = 0;
};

struct BisectOptions {
  // Probe the newest candidate too, and throw kContractViolation unless it
  // succeeds. Otherwise the caller vouches for it.
  bool verify_newest = false;
};

// Binary search for the oldest succeeding candidate of a monotone sequence
// (successes newer, failures older). An unstable probe is replaced by the
// nearest probeable candidate inside the current bracket, alternating
// older/newer. Each index is probed at most once.
BisectResult BisectEarliestSuccess(size_t candidates,
                                   const std::function<ProbeVerdict(size_t)> &probe,
                                   const BisectOptions &options = {});

}  // namespace retro

#endif  // RETRO_BISECT_H_
