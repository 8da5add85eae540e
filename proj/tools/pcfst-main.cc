// tools/pcfst-main.cc

// Copyright 2026  The pcfst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pcfst: graph build, pre-composition, decoding and benchmarking.
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal invariant
// violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pcfst/errors.h"
#include "pcfst/harness.h"

namespace fs = std::filesystem;
using namespace pcfst;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

struct Options {
  std::string config;
  std::string work_dir;
  std::string report;
  std::string method;
  std::optional<int> bfs_depth;
  std::optional<int> session_length;
  std::optional<int> threads;
  std::optional<uint64_t> seed;
};

DeskConfig LoadConfig(const Options &opt) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  DeskConfig c = DeskConfig::Load(opt.config);
  if (!opt.work_dir.empty()) c.work_dir = opt.work_dir;
  if (!opt.method.empty()) {
    c.precompose.method = ParseMethod(opt.method);
    c.bench.methods = {c.precompose.method};
  }
  if (opt.bfs_depth) c.precompose.bfs_depth = *opt.bfs_depth;
  if (opt.session_length) c.bench.session_length = *opt.session_length;
  if (opt.threads) c.bench.threads = *opt.threads;
  if (opt.seed) c.simulation.seed = *opt.seed;
  c.Validate();
  return c;
}

fs::path CachePath(const DeskConfig &c) { return fs::path(c.work_dir) / "public-cache.txt"; }

void WriteJson(const nlohmann::json &j, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw ResourceError("cannot write " + path);
  os << j.dump(2) << '\n';
}

std::shared_ptr<const PublicCache> LoadCacheOrEmpty(const DeskConfig &c, const DeskGraph &g) {
  fs::path path = CachePath(c);
  if (fs::exists(path)) {
    std::ifstream is(path);
    return PublicCache::Read(is, g.graph);
  }
  auto cache = std::make_shared<PublicCache>(g.graph);
  cache->Intern(g.graph->StartKey());
  cache->Seal();
  return cache;
}

int CmdBuild(const Options &opt) {
  DeskConfig c = LoadConfig(opt);
  DeskGraph g = BuildDeskGraph(c);
  WriteDeskGraph(g, c.work_dir);
  std::cout << "t1: " << g.graph->t1().NumStates() << " states, " << g.graph->t1().NumArcs()
            << " arcs\n";
  std::cout << "root: " << g.graph->root().NumStates() << " states, "
            << g.graph->root().NumArcs() << " arcs\n";
  size_t states = 0, arcs = 0;
  for (const auto &[user, fst] : g.contact_fsts) {
    states += fst->NumStates();
    arcs += fst->NumArcs();
  }
  std::cout << "contacts: " << g.contact_fsts.size() << " users, " << states << " states, "
            << arcs << " arcs\n";
  std::cout << "artifacts written to " << c.work_dir << "\n";
  return 0;
}

int CmdPrecompose(const Options &opt, PrecomposeMethod default_method) {
  Options o = opt;
  if (o.method.empty()) o.method = MethodName(default_method);
  DeskConfig c = LoadConfig(o);
  DeskGraph g = ReadDeskGraph(c.work_dir);
  std::vector<Utterance> warmup;
  if (c.precompose.method == PrecomposeMethod::kWarmup ||
      c.precompose.method == PrecomposeMethod::kBoth)
    warmup = LoadUtterances(c.Resolve(c.warmup));
  PrecomposeStats stats;
  std::shared_ptr<const PublicCache> cache =
      BuildPublicCache(g, c.precompose, warmup, c.decode, c.simulation, &stats);
  {
    std::ofstream os(CachePath(c));
    if (!os) throw ResourceError("cannot write " + CachePath(c).string());
    cache->Write(os);
  }
  for (const std::string &e : stats.warmup_errors) std::cerr << "warning: " << e << "\n";
  nlohmann::json j = {{"method", MethodName(c.precompose.method)},
                      {"bfs_depth", c.precompose.bfs_depth},
                      {"public_states", cache->NumStates()},
                      {"expanded_states", cache->NumExpanded()},
                      {"arcs", cache->NumArcs()},
                      {"bytes_public", cache->ModeledBytes()},
                      {"bfs_expanded", stats.bfs_expanded},
                      {"warmup_promoted", stats.warmup_promoted},
                      {"warmup_errors", stats.warmup_errors.size()},
                      {"budget_exhausted", stats.budget_exhausted},
                      {"seconds", stats.seconds}};
  std::cout << j.dump(2) << "\n";
  if (!opt.report.empty()) WriteJson(j, opt.report);
  return 0;
}

int CmdDecode(const Options &opt) {
  DeskConfig c = LoadConfig(opt);
  DeskGraph g = ReadDeskGraph(c.work_dir);
  std::shared_ptr<const PublicCache> cache = LoadCacheOrEmpty(c, g);
  std::vector<Utterance> utts = LoadUtterances(c.Resolve(c.utterances));
  ConfigurationResult r = RunConfiguration(fs::exists(CachePath(c)) ? "cached" : "none", g, cache,
                                           utts, c.bench, c.decode, c.simulation);
  for (const UtteranceResult &u : r.utterances) {
    std::cout << u.id << '\t';
    if (!u.error.empty())
      std::cout << "<error: " << u.error << ">";
    else if (!u.found)
      std::cout << "<no hypothesis>";
    else
      for (size_t i = 0; i < u.words.size(); ++i) std::cout << (i ? " " : "") << u.words[i];
    std::cout << '\n';
  }
  std::cerr << "WER " << std::fixed << std::setprecision(2) << r.edits.Wer() << "% ("
            << r.edits.Errors() << "/" << r.edits.reference_words << "), otf_expansions "
            << r.otf_expansions << "\n";
  if (!opt.report.empty()) {
    BenchReport report;
    report.config = c.ToJson();
    report.concurrency = c.bench.concurrency;
    report.configurations.push_back(std::move(r));
    WriteJson(report.ToJson(), opt.report);
  }
  return 0;
}

void PrintBenchTable(const BenchReport &report) {
  std::cout << std::left << std::setw(8) << "method" << std::right << std::setw(10) << "pub_st"
            << std::setw(10) << "otf" << std::setw(10) << "pub_hit" << std::setw(10)
            << "priv_hit" << std::setw(8) << "WER%" << std::setw(12) << "marg_bytes"
            << std::setw(9) << "rtf_p50" << std::setw(9) << "rtf_p95" << "  otf/turn\n";
  for (const ConfigurationResult &r : report.configurations) {
    std::cout << std::left << std::setw(8) << r.name << std::right << std::setw(10)
              << r.public_states << std::setw(10) << r.otf_expansions << std::setw(10)
              << r.public_hits << std::setw(10) << r.private_hits << std::setw(8) << std::fixed
              << std::setprecision(2) << r.edits.Wer() << std::setw(12) << std::setprecision(0)
              << r.marginal_bytes_per_session << std::setw(9) << std::setprecision(4)
              << r.rtf_p50 << std::setw(9) << r.rtf_p95 << " ";
    std::cout << std::setprecision(1);
    for (double v : r.mean_otf_per_turn) std::cout << " " << v;
    std::cout << "\n";
  }
}

int CmdBench(const Options &opt) {
  DeskConfig c = LoadConfig(opt);
  DeskGraph g = ReadDeskGraph(c.work_dir);
  BenchReport report = RunBench(c, g);
  PrintBenchTable(report);
  if (!opt.report.empty()) WriteJson(report.ToJson(), opt.report);
  return 0;
}

int CmdScore(const Options &opt) {
  DeskConfig c = LoadConfig(opt);
  if (opt.report.empty()) throw ConfigError("score needs --report <path>");
  std::ifstream is(opt.report);
  if (!is) throw DataError("cannot open " + opt.report);
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(opt.report + ": " + e.what());
  }
  std::vector<ScoreRow> rows = ScoreReport(report, LoadUtterances(c.Resolve(c.utterances)));
  std::cout << std::left << std::setw(10) << "config" << std::right << std::setw(6) << "sub"
            << std::setw(6) << "ins" << std::setw(6) << "del" << std::setw(8) << "words"
            << std::setw(9) << "WER%\n";
  for (const ScoreRow &r : rows)
    std::cout << std::left << std::setw(10) << r.configuration << std::right << std::setw(6)
              << r.edits.substitutions << std::setw(6) << r.edits.insertions << std::setw(6)
              << r.edits.deletions << std::setw(8) << r.edits.reference_words << std::setw(8)
              << std::fixed << std::setprecision(2) << r.edits.Wer() << "\n";
  return 0;
}

int CmdStats(const Options &opt) {
  DeskConfig c = LoadConfig(opt);
  DeskGraph g = ReadDeskGraph(c.work_dir);
  nlohmann::json j = {
      {"t1", {{"states", g.graph->t1().NumStates()}, {"arcs", g.graph->t1().NumArcs()}}},
      {"root", {{"states", g.graph->root().NumStates()}, {"arcs", g.graph->root().NumArcs()}}},
      {"phones", g.syms.phones->NumSymbols() - 1},
      {"words", g.syms.words->NumSymbols() - 1},
      {"users", g.contact_fsts.size()}};
  if (fs::exists(CachePath(c))) {
    std::shared_ptr<const PublicCache> cache = LoadCacheOrEmpty(c, g);
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << cache->Checksum();
    j["public_cache"] = {{"states", cache->NumStates()},
                         {"expanded", cache->NumExpanded()},
                         {"arcs", cache->NumArcs()},
                         {"bytes", cache->ModeledBytes()},
                         {"checksum", hex.str()}};
  }
  std::cout << j.dump(2) << "\n";
  if (!opt.report.empty()) WriteJson(j, opt.report);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"pcfst: pre-composed class-LM decoding graphs"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App *cmd) {
    cmd->add_option("--config", opt.config, "benchmark configuration (JSON)")->required();
    cmd->add_option("--work-dir", opt.work_dir, "artifact directory (overrides config)");
    cmd->add_option("--report", opt.report, "JSON report path");
    cmd->add_option("--method", opt.method, "pre-composition method")
        ->check(CLI::IsMember({"bfs", "warmup", "both", "none"}));
    cmd->add_option("--bfs-depth", opt.bfs_depth, "BFS distance")->check(CLI::NonNegativeNumber);
    cmd->add_option("--session-length", opt.session_length, "turns per session")
        ->check(CLI::IsMember({1, 2, 5}));
    cmd->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "acoustic simulation seed");
  };
  CLI::App *build = app.add_subcommand("build", "build graph artifacts");
  CLI::App *precompose = app.add_subcommand("precompose", "build and dump the public cache");
  CLI::App *warmup = app.add_subcommand("warmup", "pre-compose by decoding warm-up utterances");
  CLI::App *decode = app.add_subcommand("decode", "decode the test utterances");
  CLI::App *bench = app.add_subcommand("bench", "compare caching configurations");
  CLI::App *score = app.add_subcommand("score", "WER table from a report");
  CLI::App *stats = app.add_subcommand("stats", "graph and cache statistics");
  for (CLI::App *cmd : {build, precompose, warmup, decode, bench, score, stats}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*build) return CmdBuild(opt);
    if (*precompose) return CmdPrecompose(opt, PrecomposeMethod::kBfs);
    if (*warmup) return CmdPrecompose(opt, PrecomposeMethod::kWarmup);
    if (*decode) return CmdDecode(opt);
    if (*bench) return CmdBench(opt);
    if (*score) return CmdScore(opt);
    if (*stats) return CmdStats(opt);
  } catch (const ConfigError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ResourceError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvariantError &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
