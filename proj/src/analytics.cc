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

#include "retro/analytics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "retro/error.h"

namespace retro {
namespace {

void RequireNonEmpty(std::span<const DelayPair> pairs) {
  if (pairs.empty()) Fail(ErrorCode::kEmptyStats, "no completed reports");
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

template <typename Key>
void Accumulate(std::map<Key, DelayMeans> &out, const Key &key, const DelayPair &p) {
  DelayMeans &m = out[key];
  m.mean_d1 += p.d1_days;
  m.mean_d2 += p.d2_days;
  ++m.count;
}

template <typename Key>
void Finish(std::map<Key, DelayMeans> &out) {
  for (auto &[key, m] : out) {
    m.mean_d1 /= m.count;
    m.mean_d2 /= m.count;
  }
}

double RSquared(const Eigen::MatrixXd &design, const Eigen::VectorXd &y) {
  const double mean = y.mean();
  const double total = (y.array() - mean).square().sum();
  if (total <= 0) return 0;
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  const double residual = (y - design * beta).squaredNorm();
  return std::clamp(1.0 - residual / total, 0.0, 1.0);
}

}  // namespace

DelayPair ComputeDelayPair(const RetrospectionReport &report, Day epoch) {
  if (report.status != ReportStatus::kCompleted || !report.revealing_date) {
    Fail(ErrorCode::kValidation, "report '" + report.bug_id + "' is not completed");
  }
  DelayPair p;
  p.bug_id = report.bug_id;
  std::tie(p.d1_days, p.d2_days) =
      ComputeDelays(report.guilty_date, *report.revealing_date, report.finding_date, epoch);
  p.found_year = report.finding_date.Year();
  p.guilty_year = report.guilty_date.Year();
  p.directory = report.directory.empty() ? "other" : report.directory;
  p.factor_class = report.factor_class;
  return p;
}

std::vector<DelayPair> CollectDelayPairs(std::span<const RetrospectionReport> reports,
                                         Day epoch, std::vector<std::string> *skipped) {
  std::vector<DelayPair> out;
  for (const auto &r : reports) {
    if (r.status != ReportStatus::kCompleted) {
      if (skipped != nullptr) skipped->push_back(r.bug_id);
      continue;
    }
    out.push_back(ComputeDelayPair(r, epoch));
  }
  return out;
}

std::map<FactorClass, double> FactorDistribution(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  std::map<FactorClass, double> out;
  for (FactorClass f : kOutcomeClasses) out[f] = 0;
  for (const auto &p : pairs) out[p.factor_class] += 1;
  for (auto &[f, v] : out) v /= pairs.size();
  return out;
}

YearClassCounts RevealsByYear(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  YearClassCounts out;
  for (const auto &p : pairs) {
    auto &row = out[p.found_year];
    if (row.empty()) {
      for (FactorClass f : kOutcomeClasses) row[f] = 0;
    }
    ++row[p.factor_class];
  }
  return out;
}

std::map<int, DelayMeans> DelaysByYear(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  std::map<int, DelayMeans> out;
  for (const auto &p : pairs) Accumulate(out, p.found_year, p);
  Finish(out);
  return out;
}

std::map<std::string, DelayMeans> DelaysByDirectory(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  std::map<std::string, DelayMeans> out;
  for (const auto &p : pairs) Accumulate(out, p.directory, p);
  Finish(out);
  return out;
}

GuiltyFoundMatrix GuiltyVsFound(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  GuiltyFoundMatrix out;
  for (const auto &p : pairs) ++out[p.found_year][p.guilty_year];
  return out;
}

double HiddenShare(const std::map<FactorClass, double> &shares) {
  auto it = shares.find(FactorClass::kNeverHidden);
  return 1.0 - (it == shares.end() ? 0.0 : it->second);
}

std::string_view ToString(FitFamily family) {
  switch (family) {
    case FitFamily::kLinear: return "linear";
    case FitFamily::kQuadratic: return "quadratic";
    case FitFamily::kLog: return "log";
  }
  return "linear";
}

IndependenceResult IndependenceCheck(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) Fail(ErrorCode::kArgument, "fit inputs differ in length");
  if (x.size() < 3) Fail(ErrorCode::kArgument, "independence check needs at least 3 pairs");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), n);
  const Eigen::Map<const Eigen::VectorXd> ys(y.data(), n);
  const bool flat_x = xs.maxCoeff() == xs.minCoeff();
  IndependenceResult out;
  for (FitFamily family : {FitFamily::kLinear, FitFamily::kQuadratic, FitFamily::kLog}) {
    FitResult fit{family, 0};
    if (!flat_x) {
      Eigen::MatrixXd design(n, family == FitFamily::kQuadratic ? 3 : 2);
      design.col(0).setOnes();
      if (family == FitFamily::kLog) {
        design.col(1) = xs.array().log1p();
      } else {
        design.col(1) = xs;
      }
      if (family == FitFamily::kQuadratic) design.col(2) = xs.array().square();
      fit.r2 = RSquared(design, ys);
    }
    out.best_r2 = std::max(out.best_r2, fit.r2);
    out.fits.push_back(fit);
  }
  return out;
}

IndependenceResult IndependenceCheck(std::span<const DelayPair> pairs) {
  std::vector<double> x, y;
  for (const auto &p : pairs) {
    x.push_back(p.d1_days);
    y.push_back(p.d2_days);
  }
  return IndependenceCheck(x, y);
}

double D1SettlingEstimate(const std::map<FactorClass, double> &shares, double peak_d1) {
  double remaining = 0;
  for (FactorClass f : {FactorClass::kKernelCommit, FactorClass::kBlockingBug}) {
    if (auto it = shares.find(f); it != shares.end()) remaining += it->second;
  }
  return peak_d1 * remaining;
}

CampaignStats ComputeCampaignStats(std::span<const DelayPair> pairs) {
  RequireNonEmpty(pairs);
  CampaignStats s;
  s.bugs = static_cast<int>(pairs.size());
  s.factor_shares = FactorDistribution(pairs);
  for (FactorClass f : kOutcomeClasses) s.factor_counts[f] = 0;
  for (const auto &p : pairs) ++s.factor_counts[p.factor_class];
  s.reveals_by_year = RevealsByYear(pairs);
  s.delays_by_year = DelaysByYear(pairs);
  s.delays_by_directory = DelaysByDirectory(pairs);
  s.guilty_vs_found = GuiltyVsFound(pairs);
  for (const auto &p : pairs) {
    s.overall.mean_d1 += p.d1_days;
    s.overall.mean_d2 += p.d2_days;
  }
  s.overall.count = s.bugs;
  s.overall.mean_d1 /= s.bugs;
  s.overall.mean_d2 /= s.bugs;
  if (pairs.size() >= 3) s.independence = IndependenceCheck(pairs);
  for (const auto &[year, m] : s.delays_by_year) s.peak_d1 = std::max(s.peak_d1, m.mean_d1);
  s.d1_floor_estimate = D1SettlingEstimate(s.factor_shares, s.peak_d1);
  return s;
}

std::map<std::string, std::string> RenderTables(const CampaignStats &stats) {
  std::map<std::string, std::string> out;

  std::string fig4 = "factor,count,percent\n";
  for (const auto &[f, share] : stats.factor_shares) {
    fig4 += std::string(ToString(f)) + "," + std::to_string(stats.factor_counts.at(f)) + "," +
            Fixed(share * 100) + "\n";
  }
  out["fig4_factors"] = fig4;

  std::vector<FactorClass> columns(std::begin(kOutcomeClasses), std::end(kOutcomeClasses));
  if (stats.factor_counts.count(FactorClass::kNeedsManualReview) &&
      stats.factor_counts.at(FactorClass::kNeedsManualReview) > 0) {
    columns.push_back(FactorClass::kNeedsManualReview);
  }
  std::string t1 = "found_year";
  for (FactorClass f : columns) t1 += "," + std::string(ToString(f));
  t1 += ",total\n";
  for (const auto &[year, row] : stats.reveals_by_year) {
    int total = 0;
    t1 += std::to_string(year);
    for (FactorClass f : columns) {
      auto it = row.find(f);
      const int n = it == row.end() ? 0 : it->second;
      total += n;
      t1 += "," + std::to_string(n);
    }
    t1 += "," + std::to_string(total) + "\n";
  }
  out["table1_reveals"] = t1;

  std::string fig7 = "found_year,bugs,mean_d1_days,mean_d2_days\n";
  for (const auto &[year, m] : stats.delays_by_year) {
    fig7 += std::to_string(year) + "," + std::to_string(m.count) + "," + Fixed(m.mean_d1, 2) +
            "," + Fixed(m.mean_d2, 2) + "\n";
  }
  out["fig7_delays_by_year"] = fig7;

  std::string fig8 = "directory,bugs,mean_d1_days,mean_d2_days\n";
  for (const auto &[dir, m] : stats.delays_by_directory) {
    fig8 += dir + "," + std::to_string(m.count) + "," + Fixed(m.mean_d1, 2) + "," +
            Fixed(m.mean_d2, 2) + "\n";
  }
  out["fig8_delays_by_dir"] = fig8;

  std::map<int, std::map<int, int>> by_guilty;
  for (const auto &[found, row] : stats.guilty_vs_found) {
    for (const auto &[guilty, n] : row) by_guilty[guilty][found] += n;
  }
  std::string t2 = "guilty_year";
  for (const auto &[found, row] : stats.guilty_vs_found) t2 += "," + std::to_string(found);
  t2 += ",total\n";
  std::map<int, int> column_totals;
  for (const auto &[guilty, row] : by_guilty) {
    int total = 0;
    t2 += std::to_string(guilty);
    for (const auto &[found, unused] : stats.guilty_vs_found) {
      auto it = row.find(found);
      const int n = it == row.end() ? 0 : it->second;
      total += n;
      column_totals[found] += n;
      t2 += "," + std::to_string(n);
    }
    t2 += "," + std::to_string(total) + "\n";
  }
  t2 += "total";
  int grand = 0;
  for (const auto &[found, n] : column_totals) {
    t2 += "," + std::to_string(n);
    grand += n;
  }
  t2 += "," + std::to_string(grand) + "\n";
  out["table2_matrix"] = t2;

  std::string fits = "family,r2\n";
  for (const auto &f : stats.independence.fits) {
    fits += std::string(ToString(f.family)) + "," + Fixed(f.r2, 6) + "\n";
  }
  out["independence"] = fits;

  std::string summary = "metric,value\n";
  summary += "bugs," + std::to_string(stats.bugs) + "\n";
  summary += "hidden_percent," + Fixed(HiddenShare(stats.factor_shares) * 100) + "\n";
  summary += "mean_d1_days," + Fixed(stats.overall.mean_d1, 2) + "\n";
  summary += "mean_d2_days," + Fixed(stats.overall.mean_d2, 2) + "\n";
  summary += "best_r2," + Fixed(stats.independence.best_r2, 6) + "\n";
  summary += "peak_d1_days," + Fixed(stats.peak_d1, 2) + "\n";
  summary += "d1_floor_estimate_days," + Fixed(stats.d1_floor_estimate, 2) + "\n";
  out["summary"] = summary;
  return out;
}

std::string RenderVmCurve(std::span<const VmPoint> curve) {
  std::string out = "vm_count,mean_d2_days,samples\n";
  for (const auto &p : curve) {
    out += std::to_string(p.vm_count) + "," + Fixed(p.mean_d2_days, 2) + "," +
           std::to_string(p.samples) + "\n";
  }
  return out;
}

}  // namespace retro
