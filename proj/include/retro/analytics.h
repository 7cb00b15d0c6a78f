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

#ifndef RETRO_ANALYTICS_H_
#define RETRO_ANALYTICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "retro/bug.h"
#include "retro/calendar.h"
#include "retro/retrospect.h"
#include "retro/synthetic_world.h"

namespace retro {

struct DelayPair {
  std::string bug_id;
  int d1_days = 0;
  int d2_days = 0;
  int found_year = 0;
  int guilty_year = 0;
  std::string directory;
  FactorClass factor_class = FactorClass::kNeedsManualReview;
};

// Throws kValidation unless the report is completed and its dates are
// ordered. Never-hidden bugs introduced before the epoch get d1 = 0.
DelayPair ComputeDelayPair(const RetrospectionReport &report, Day epoch);

// Pairs for every completed report; ids of the rest go to `skipped`.
std::vector<DelayPair> CollectDelayPairs(std::span<const RetrospectionReport> reports,
                                         Day epoch, std::vector<std::string> *skipped);

struct DelayMeans {
  double mean_d1 = 0;
  double mean_d2 = 0;
  int count = 0;
};

using YearClassCounts = std::map<int, std::map<FactorClass, int>>;
// found year -> guilty year -> count.
using GuiltyFoundMatrix = std::map<int, std::map<int, int>>;

// All of these throw kEmptyStats on empty input.
std::map<FactorClass, double> FactorDistribution(std::span<const DelayPair> pairs);
YearClassCounts RevealsByYear(std::span<const DelayPair> pairs);
std::map<int, DelayMeans> DelaysByYear(std::span<const DelayPair> pairs);
std::map<std::string, DelayMeans> DelaysByDirectory(std::span<const DelayPair> pairs);
GuiltyFoundMatrix GuiltyVsFound(std::span<const DelayPair> pairs);

// 1 - never_hidden share.
double HiddenShare(const std::map<FactorClass, double> &shares);

enum class FitFamily { kLinear, kQuadratic, kLog };
std::string_view ToString(FitFamily family);

struct FitResult {
  FitFamily family = FitFamily::kLinear;
  double r2 = 0;
};

struct IndependenceResult {
  std::vector<FitResult> fits;
  double best_r2 = 0;
};

// Least-squares fits of y on x; the log family uses ln(1 + x). Zero
// variance in x or y gives r2 = 0. Throws kArgument for fewer than three
// points or mismatched lengths.
IndependenceResult IndependenceCheck(std::span<const double> x, std::span<const double> y);
IndependenceResult IndependenceCheck(std::span<const DelayPair> pairs);

// peak_d1 times the kernel_commit plus blocking_bug share.
double D1SettlingEstimate(const std::map<FactorClass, double> &shares, double peak_d1);

struct CampaignStats {
  int bugs = 0;
  std::map<FactorClass, double> factor_shares;
  std::map<FactorClass, int> factor_counts;
  YearClassCounts reveals_by_year;
  std::map<int, DelayMeans> delays_by_year;
  std::map<std::string, DelayMeans> delays_by_directory;
  GuiltyFoundMatrix guilty_vs_found;
  DelayMeans overall;
  IndependenceResult independence;
  double peak_d1 = 0;
  double d1_floor_estimate = 0;
};

CampaignStats ComputeCampaignStats(std::span<const DelayPair> pairs);

// CSV tables with header rows, keyed by file stem.
std::map<std::string, std::string> RenderTables(const CampaignStats &stats);
std::string RenderVmCurve(std::span<const VmPoint> curve);

}  // namespace retro

#endif  // RETRO_ANALYTICS_H_
