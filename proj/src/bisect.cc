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

#include "retro/bisect.h"

#include <algorithm>
#include <map>

#include "retro/error.h"

namespace retro {

BisectResult BisectEarliestSuccess(size_t candidates,
                                   const std::function<ProbeVerdict(size_t)> &probe,
                                   const BisectOptions &options) {
  if (candidates == 0) Fail(ErrorCode::kArgument, "bisect: no candidates");
  BisectResult out;
  std::map<size_t, ProbeVerdict> seen;
  auto run = [&](size_t i) {
    auto it = seen.find(i);
    if (it != seen.end()) return it->second;
    const ProbeVerdict v = probe(i);
    ++out.probes;
    seen.emplace(i, v);
    if (v == ProbeVerdict::kUnstable) out.unstable.push_back(i);
    return v;
  };
  if (options.verify_newest && run(0) != ProbeVerdict::kSuccess) {
    Fail(ErrorCode::kContractViolation, "bisect: newest candidate does not succeed");
  }

  // lo succeeds; hi fails, or is one past the oldest candidate.
  size_t lo = 0;
  size_t hi = candidates;
  while (hi - lo > 1) {
    const size_t mid = lo + (hi - lo) / 2;
    std::optional<size_t> pick;
    ProbeVerdict v = ProbeVerdict::kUnstable;
    for (size_t r = 0; !pick; ++r) {
      bool in_bracket = false;
      for (int side : {-1, 1}) {
        if (r == 0 && side == 1) continue;
        const long k = static_cast<long>(mid) + side * static_cast<long>(r);
        if (k <= static_cast<long>(lo) || k >= static_cast<long>(hi)) continue;
        in_bracket = true;
        v = run(static_cast<size_t>(k));
        if (v != ProbeVerdict::kUnstable) {
          pick = static_cast<size_t>(k);
          break;
        }
      }
      if (!in_bracket) break;
    }
    if (!pick) {
      out.unstable_range = true;
      break;
    }
    if (v == ProbeVerdict::kSuccess) {
      lo = *pick;
    } else {
      hi = *pick;
    }
  }
  out.earliest_success = lo;
  if (hi < candidates) out.latest_failure = hi;
  std::sort(out.unstable.begin(), out.unstable.end());
  return out;
}

}  // namespace retro
