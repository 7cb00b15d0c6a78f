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

// retro: command-line front end.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "retro/analytics.h"
#include "retro/campaign.h"
#include "retro/error.h"
#include "retro/probe_cache.h"
#include "retro/retrospect.h"
#include "retro/rng.h"
#include "retro/serialization.h"
#include "retro/strings.h"
#include "retro/synthetic_world.h"
#include "retro/syzlang.h"

namespace fs = std::filesystem;

namespace retro {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

// Flags shared by the commands that run retrospection.
struct RunFlags {
  std::optional<std::string> config;
  std::optional<std::string> world;
  std::optional<std::string> bugs;
  std::optional<std::string> cache;
  std::optional<std::string> epoch;
  std::optional<double> blocking_threshold;
  bool no_retry = false;
  std::optional<int> vm_count;
  std::optional<int> jobs;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
};

void AddRunFlags(CLI::App *cmd, RunFlags &f) {
  cmd->add_option("--config", f.config, "Config document (JSON)");
  cmd->add_option("--world", f.world, "World file written by simulate-world");
  cmd->add_option("--bugs", f.bugs, "Bug records to process (default: the world's)");
  cmd->add_option("--cache", f.cache, "Session cache log (RETRO_CACHE overrides the config)");
  cmd->add_option("--epoch", f.epoch, "D1 truncation floor (YYYY-MM-DD)");
  cmd->add_option("--blocking-threshold", f.blocking_threshold, "Co-occurrence rate");
  cmd->add_flag("--no-retry", f.no_retry, "Accept boundary failures without a retry");
  cmd->add_option("--vm-count", f.vm_count, "VMs per session");
  cmd->add_option("--seed", f.seed, "Session seed");
}

CampaignConfig LoadConfig(const RunFlags &f) {
  CampaignConfig c;
  if (f.config) c = ConfigFromJson(ParseJson(ReadFile(*f.config), *f.config), *f.config);
  if (const char *env = std::getenv("RETRO_CACHE"); env != nullptr && *env != '\0') {
    c.cache_path = env;
  }
  if (f.world) {
    c.world_path = *f.world;
    c.world_spec.reset();
    c.ingest.reset();
  }
  if (f.bugs) c.bugs_path = *f.bugs;
  if (f.cache) c.cache_path = *f.cache;
  if (f.epoch) c.epoch = Day::FromIso(*f.epoch);
  if (f.blocking_threshold) c.blocking_threshold = *f.blocking_threshold;
  if (f.no_retry) c.retry = false;
  if (f.vm_count) c.vm_count = *f.vm_count;
  if (f.jobs) c.parallelism = *f.jobs;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output_dir = *f.out;
  c.Validate();
  return c;
}

SyntheticWorld LoadWorld(const CampaignConfig &c) {
  if (c.ingest) {
    Fail(ErrorCode::kValidation,
         "config field 'ingest': no fuzzing backend is available for real-ingest inputs; "
         "use 'world' or 'world_spec'");
  }
  if (c.world_spec) return GenerateWorld(*c.world_spec);
  return SyntheticWorld(WorldFromJson(ParseJson(ReadFile(*c.world_path), *c.world_path),
                                      *c.world_path));
}

std::vector<BugRecord> LoadBugs(const CampaignConfig &c, const SyntheticWorld &world) {
  if (!c.bugs_path) return {world.bugs().begin(), world.bugs().end()};
  auto bugs = BugsFromJson(ParseJson(ReadFile(*c.bugs_path), *c.bugs_path), *c.bugs_path);
  for (const auto &b : bugs) world.Bug(b.id);
  return bugs;
}

std::unique_ptr<ProbeCache> OpenCache(const CampaignConfig &c) {
  if (!c.cache_path) return nullptr;
  return ProbeCache::Open(*c.cache_path);
}

std::string CachePath(const std::optional<std::string> &flag) {
  if (flag) return *flag;
  if (const char *env = std::getenv("RETRO_CACHE"); env != nullptr && *env != '\0') return env;
  Fail(ErrorCode::kArgument, "no cache path: pass --cache or set RETRO_CACHE");
}

std::string HexDigest(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a(text)));
  return buf;
}

void EnsureDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

void WriteProvenance(const fs::path &dir, std::string_view command,
                     std::string_view config_hash, uint64_t seed) {
  WriteFile((dir / "provenance.json").string(),
            Dump(Json{{"command", command}, {"config_hash", config_hash}, {"seed", seed}}));
}

std::vector<SourceFile> ReadSources(const std::vector<std::string> &paths) {
  std::vector<std::string> files;
  for (const auto &p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto &entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) Fail(ErrorCode::kArgument, "no description files given");
  std::vector<SourceFile> out;
  for (const auto &f : files) out.push_back({f, ReadFile(f)});
  return out;
}

// simulate-world

struct SimulateFlags {
  std::optional<std::string> spec;
  std::optional<uint64_t> seed;
  std::optional<int> bugs;
  std::optional<double> p_min;
  std::optional<double> p_max;
  std::optional<double> unstable_density;
  bool random_find_times = false;
  bool legacy_inout = false;
  std::string out = "world";
};

int RunSimulate(const SimulateFlags &f) {
  WorldSpec spec;
  if (f.spec) {
    Json j = ParseJson(ReadFile(*f.spec), *f.spec);
    if (j.contains("schema")) {
      RequireSchema(j, kWorldSpecSchema, *f.spec);
      j.erase("schema");
    }
    spec = FromJsonChecked<WorldSpec>(j, *f.spec);
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.bugs) spec.bugs = *f.bugs;
  if (f.p_min) spec.p_min = *f.p_min;
  if (f.p_max) spec.p_max = *f.p_max;
  if (f.unstable_density) spec.unstable_density = *f.unstable_density;
  if (f.random_find_times) spec.random_find_times = true;
  if (f.legacy_inout) spec.legacy_inout = true;
  spec.Validate();
  const SyntheticWorld world = GenerateWorld(spec);
  const std::string config_hash = HexDigest(Json(spec).dump());
  EnsureDir(f.out);
  Json w = WorldToJson(world.data());
  w["config_hash"] = config_hash;
  w["seed"] = spec.seed;
  Json b = BugsToJson(world.bugs());
  b["config_hash"] = config_hash;
  b["seed"] = spec.seed;
  WriteFile((fs::path(f.out) / "world.json").string(), Dump(w));
  WriteFile((fs::path(f.out) / "bugs.json").string(), Dump(b));
  std::cout << "wrote " << f.out << "/world.json (" << world.bugs().size() << " bugs, "
            << world.target_axis().size() << " target commits, "
            << world.fuzzer_axis().size() << " fuzzer commits)\n";
  return kExitOk;
}

// focus

struct FocusFlags {
  std::vector<std::string> descriptions;
  std::optional<std::string> world;
  std::optional<std::string> commit;
  std::optional<std::string> bug;
  std::vector<std::string> calls;
  std::optional<std::vector<std::string>> mandatory;
  bool legacy_inout = false;
  std::optional<std::string> out;
};

int RunFocus(const FocusFlags &f) {
  if (f.descriptions.empty() == !f.world.has_value()) {
    Fail(ErrorCode::kArgument, "pass exactly one of --descriptions or --world");
  }
  FocusOptions options;
  if (f.mandatory) options.mandatory_calls = *f.mandatory;
  std::vector<std::string> calls = f.calls;
  std::shared_ptr<const DescriptionCorpus> corpus;
  std::optional<SyntheticWorld> world;
  std::string where;
  if (f.world) {
    world.emplace(WorldFromJson(ParseJson(ReadFile(*f.world), *f.world), *f.world));
    if (f.bug) {
      const BugRecord &bug = world->Bug(*f.bug);
      if (calls.empty()) calls = bug.reproducer_calls;
    }
    std::string commit = f.commit.value_or(world->fuzzer_axis().newest().id);
    if (!f.commit && f.bug) {
      commit = RepresentativeForDay(world->fuzzer_axis(), world->Bug(*f.bug).finding_date).id;
    }
    world->fuzzer_axis().RequireIndex(commit);
    corpus = world->descriptions().SnapshotAt(commit);
    where = "fuzzer commit " + commit;
  } else {
    auto sources = ReadSources(f.descriptions);
    corpus = std::make_shared<DescriptionCorpus>(ParseDescriptions(sources, f.legacy_inout));
    where = std::to_string(sources.size()) + " file(s)";
  }
  if (calls.empty()) Fail(ErrorCode::kArgument, "no reproducer calls: pass --calls or --bug");
  for (const auto &d : corpus->diagnostics()) std::cerr << "note: " << d << "\n";
  const FocusedSet set = Focus(*corpus, calls, options);
  std::string text = "# focused set " + set.Hash() + " from " + where + "\n";
  text += "# seeds: " + Join(calls, ",") + "\n";
  text += set.Render();
  if (f.out) {
    WriteFile(*f.out, text);
    std::cout << "wrote " << *f.out << " (" << set.entities.size() << " entities, hash "
              << set.Hash() << ")\n";
  } else {
    std::cout << text;
  }
  return kExitOk;
}

// retrospect

int RunRetrospect(RunFlags f, const std::string &bug_id) {
  const std::optional<std::string> out = f.out;
  f.out.reset();
  const CampaignConfig config = LoadConfig(f);
  const SyntheticWorld world = LoadWorld(config);
  const BugRecord &bug = world.Bug(bug_id);
  auto cache = OpenCache(config);
  const auto fix_index = world.FixIndex();
  const RetroContext ctx{world.target_axis(), world.fuzzer_axis(), world.descriptions(),
                         world,   cache.get(),     &world.toolchains(),
                         &world.patches(), &fix_index};
  RetroStats stats;
  const RetrospectionReport report = RetrospectBug(bug, ctx, config.Options(), &stats);
  const std::string text = Dump(ReportToJson(report, config.Hash(), config.seed));
  if (out) {
    WriteFile(*out, text);
    std::cout << bug.id << ": " << ToString(report.status);
    if (report.status == ReportStatus::kCompleted) {
      std::cout << " " << ToString(report.factor_class) << " " << report.revealing_commit;
    }
    std::cout << " (" << stats.oracle_sessions << " sessions, " << stats.cache_hits
              << " cache hits)\n";
  } else {
    std::cout << text;
  }
  return kExitOk;
}

// campaign

int RunCampaignCommand(const RunFlags &f) {
  const CampaignConfig config = LoadConfig(f);
  const SyntheticWorld world = LoadWorld(config);
  const std::vector<BugRecord> bugs = LoadBugs(config, world);
  auto cache = OpenCache(config);
  const CampaignResult result =
      RunCampaign(world, bugs, config.Options(), cache.get(), config.parallelism);
  const std::string hash = config.Hash();
  const fs::path dir(config.output_dir);
  EnsureDir(dir / "reports");
  for (const auto &r : result.reports) {
    WriteFile((dir / "reports" / (r.bug_id + ".json")).string(),
              Dump(ReportToJson(r, hash, config.seed)));
  }
  Json index = CampaignIndex(result, hash, config.seed);
  WriteFile((dir / "campaign.json").string(), Dump(index));
  const auto &counts = index.at("counts");
  std::cout << "campaign: " << bugs.size() << " bugs";
  for (const auto &[k, v] : counts.items()) std::cout << ", " << k << " " << v.get<int>();
  std::cout << "\noracle_sessions " << result.stats.oracle_sessions << " cache_hits "
            << result.stats.cache_hits << "\n";
  for (const auto &fail : result.failures) {
    std::cerr << "error: bug " << fail.bug_id << ": " << fail.message << "\n";
  }
  const bool partial = !result.failures.empty() ||
                       counts.at("skipped_unreproducible").get<int>() > 0 ||
                       counts.at("never_describable").get<int>() > 0;
  return partial ? kExitPartial : kExitOk;
}

// vm-study

struct VmFlags {
  std::optional<std::string> world;
  std::vector<int> vms = {1, 2, 5, 10, 15, 20, 30, 40};
  int bugs_per_point = 200;
  uint64_t seed = 0;
  std::string out = "out";
};

int RunVmStudy(const VmFlags &f) {
  SyntheticWorld world =
      f.world ? SyntheticWorld(WorldFromJson(ParseJson(ReadFile(*f.world), *f.world), *f.world))
              : GenerateWorld(WorldSpec{});
  const auto curve = EstimateD2VsVms(world, f.vms, f.bugs_per_point, f.seed);
  Json cfg = {{"world_spec", world.spec()},
              {"vms", f.vms},
              {"bugs_per_point", f.bugs_per_point},
              {"seed", f.seed}};
  EnsureDir(f.out);
  WriteFile((fs::path(f.out) / "fig10_vm_curve.csv").string(), RenderVmCurve(curve));
  WriteProvenance(f.out, "vm-study", HexDigest(cfg.dump()), f.seed);
  std::cout << RenderVmCurve(curve);
  return kExitOk;
}

// stats

int RunStats(const std::string &reports_dir, const std::string &out,
             const std::optional<std::string> &epoch_flag) {
  fs::path dir(reports_dir);
  if (fs::is_directory(dir / "reports")) dir /= "reports";
  if (!fs::is_directory(dir)) Fail(ErrorCode::kArgument, "not a directory: " + reports_dir);
  std::vector<std::string> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RetrospectionReport> reports;
  std::set<std::string> hashes;
  std::set<uint64_t> seeds;
  for (const auto &file : files) {
    const Json j = ParseJson(ReadFile(file), file);
    reports.push_back(ReportFromJson(j, file));
    if (j.contains("config_hash")) hashes.insert(j.at("config_hash").get<std::string>());
    if (j.contains("seed")) seeds.insert(j.at("seed").get<uint64_t>());
  }
  const Day epoch = epoch_flag ? Day::FromIso(*epoch_flag) : SyzbotStart();
  std::vector<std::string> skipped;
  const auto pairs = CollectDelayPairs(reports, epoch, &skipped);
  const CampaignStats stats = ComputeCampaignStats(pairs);
  EnsureDir(out);
  for (const auto &[name, csv] : RenderTables(stats)) {
    WriteFile((fs::path(out) / (name + ".csv")).string(), csv);
  }
  const std::string hash = hashes.size() == 1 ? *hashes.begin() : "mixed";
  WriteProvenance(out, "stats", hash, seeds.size() == 1 ? *seeds.begin() : 0);
  std::cout << "stats: " << reports.size() << " reports, " << pairs.size() << " completed, "
            << skipped.size() << " skipped; hidden "
            << HiddenShare(stats.factor_shares) * 100 << "%, mean d1 " << stats.overall.mean_d1
            << ", mean d2 " << stats.overall.mean_d2 << ", best r2 "
            << stats.independence.best_r2 << "\n";
  return kExitOk;
}

// cache

int RunCache(const std::string &action, const std::optional<std::string> &flag) {
  const std::string path = CachePath(flag);
  if (action == "clear") {
    // A stale header is exactly what clear must recover from.
    if (fs::exists(path) && !StartsWith(ReadFile(path), "retro-cache ")) {
      Fail(ErrorCode::kValidation, path + ": not a session cache; refusing to clear");
    }
    WriteFile(path, std::string(kCacheHeader) + "\n");
    std::cout << "cleared " << path << "\n";
    return kExitOk;
  }
  auto cache = ProbeCache::Open(path);
  if (action == "compact") {
    const size_t before = cache->log_records();
    cache->Compact();
    std::cout << "compacted " << path << ": " << before << " -> " << cache->log_records()
              << " records\n";
    return kExitOk;
  }
  std::map<std::string, int> by_status;
  std::set<std::string> bugs;
  for (const auto &[key, outcome] : cache->Snapshot()) {
    ++by_status[std::string(ToString(outcome.status))];
    bugs.insert(key.substr(0, key.find('|')));
  }
  std::cout << "cache " << path << "\n"
            << "entries " << cache->size() << "\n"
            << "log_records " << cache->log_records() << "\n"
            << "bugs " << bugs.size() << "\n";
  for (const auto &[status, n] : by_status) std::cout << status << " " << n << "\n";
  return kExitOk;
}

int Main(int argc, char **argv) {
  CLI::App app{"Retrospection engine for continuous-fuzzing bugs"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto *simulate = app.add_subcommand("simulate-world", "Generate a synthetic world");
  simulate->add_option("--spec", sim.spec, "World spec document (JSON)");
  simulate->add_option("--seed", sim.seed, "Generator seed");
  simulate->add_option("--bugs", sim.bugs, "Number of bugs");
  simulate->add_option("--p-min", sim.p_min, "Lowest per-attempt find probability");
  simulate->add_option("--p-max", sim.p_max, "Highest per-attempt find probability");
  simulate->add_option("--unstable-density", sim.unstable_density, "Unstable commit share");
  simulate->add_flag("--random-find-times", sim.random_find_times, "Exponential find times");
  simulate->add_flag("--legacy-inout", sim.legacy_inout, "Legacy inout semantics");
  simulate->add_option("--out", sim.out, "Output directory");

  FocusFlags foc;
  auto *focus = app.add_subcommand("focus", "Write the focused description set");
  focus->add_option("--descriptions", foc.descriptions, "Description files or directories");
  focus->add_option("--world", foc.world, "World file");
  focus->add_option("--commit", foc.commit, "Fuzzer commit of the snapshot (with --world)");
  focus->add_option("--bug", foc.bug, "Take the reproducer calls from this bug");
  focus->add_option("--calls", foc.calls, "Reproducer syscalls")->delimiter(',');
  focus->add_option("--mandatory", foc.mandatory, "Mandatory calls")->delimiter(',');
  focus->add_flag("--legacy-inout", foc.legacy_inout, "Legacy inout semantics");
  focus->add_option("--out", foc.out, "Output file (default stdout)");

  RunFlags ret;
  std::string bug_id;
  auto *retrospect = app.add_subcommand("retrospect", "Retrospect one bug");
  AddRunFlags(retrospect, ret);
  retrospect->add_option("--bug", bug_id, "Bug id")->required();
  retrospect->add_option("--out", ret.out, "Report file (default stdout)");

  RunFlags camp;
  auto *campaign = app.add_subcommand("campaign", "Retrospect every bug");
  AddRunFlags(campaign, camp);
  campaign->add_option("--jobs", camp.jobs, "Worker threads");
  campaign->add_option("--out", camp.out, "Output directory");

  VmFlags vm;
  auto *vm_study = app.add_subcommand("vm-study", "Mean D2 against VM count");
  vm_study->add_option("--world", vm.world, "World file (default: generated)");
  vm_study->add_option("--vms", vm.vms, "VM counts")->delimiter(',');
  vm_study->add_option("--bugs-per-point", vm.bugs_per_point, "Samples per point");
  vm_study->add_option("--seed", vm.seed, "Sampling seed");
  vm_study->add_option("--out", vm.out, "Output directory");

  std::string reports_dir;
  std::string stats_out = "tables";
  std::optional<std::string> stats_epoch;
  auto *stats = app.add_subcommand("stats", "Analytics tables from a report directory");
  stats->add_option("--reports", reports_dir, "Campaign or report directory")->required();
  stats->add_option("--out", stats_out, "Output directory");
  stats->add_option("--epoch", stats_epoch, "D1 truncation floor");

  std::optional<std::string> cache_path;
  std::string cache_action;
  auto *cache = app.add_subcommand("cache", "Inspect or maintain the session cache");
  cache->add_option("action", cache_action, "inspect, clear or compact")
      ->required()
      ->check(CLI::IsMember({"inspect", "clear", "compact"}));
  cache->add_option("--cache", cache_path, "Cache log (default RETRO_CACHE)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  try {
    if (*simulate) return RunSimulate(sim);
    if (*focus) return RunFocus(foc);
    if (*retrospect) return RunRetrospect(ret, bug_id);
    if (*campaign) return RunCampaignCommand(camp);
    if (*vm_study) return RunVmStudy(vm);
    if (*stats) return RunStats(reports_dir, stats_out, stats_epoch);
    if (*cache) return RunCache(cache_action, cache_path);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace
}  // namespace retro

int main(int argc, char **argv) { return retro::Main(argc, argv); }
