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

#include "retro/error.h"

namespace retro {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kMalformedGraph: return "malformed-graph";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kCoverage: return "coverage";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kResolution: return "resolution";
    case ErrorCode::kUnsatisfiableResource: return "unsatisfiable-resource";
    case ErrorCode::kCorpusIncomplete: return "corpus-incomplete";
    case ErrorCode::kNeverDescribable: return "never-describable";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kContractViolation: return "contract-violation";
    case ErrorCode::kEmptyStats: return "empty-stats";
    case ErrorCode::kCacheVersion: return "cache-version";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace retro
