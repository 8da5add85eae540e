// pcfst/harness.h

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

// Benchmark orchestration: configuration loading, graph build and
// artifact I/O, cache construction, multi-threaded session decoding and
// JSON reports.

#ifndef PCFST_HARNESS_H_
#define PCFST_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcfst/cache.h"
#include "pcfst/decoder.h"
#include "pcfst/desk-data.h"
#include "pcfst/lm-build.h"
#include "pcfst/precompose.h"
#include "pcfst/scores.h"
#include "pcfst/wer.h"

namespace pcfst {

struct BenchPlan {
  std::vector<PrecomposeMethod> methods = {PrecomposeMethod::kNone, PrecomposeMethod::kBfs,
                                           PrecomposeMethod::kWarmup, PrecomposeMethod::kBoth};
  int session_length = 1;
  int threads = 1;
  int requests_per_thread = 0;  // utterances per worker; 0 = no limit
  int concurrency = 10;         // sessions assumed live for the memory model

  void Validate() const;
};

struct DeskConfig {
  std::filesystem::path base_dir;  // relative input paths resolve here
  std::string lexicon = "lexicon.txt";
  std::string phones;  // optional inventory file; empty = derived from lexicon
  std::string corpus = "corpus.txt";
  std::string classes = "classes.txt";
  std::string contacts = "contacts.jsonl";
  std::string utterances = "utterances.jsonl";
  std::string warmup = "warmup.jsonl";
  std::string work_dir = "pcfst-work";  // relative to the current directory
  int max_prons = 5;
  DecodeConfig decode;
  SimulationConfig simulation;
  PrecomposeConfig precompose;
  BenchPlan bench;

  // Throws DataError for unreadable or malformed files, ConfigError for
  // invalid values.
  static DeskConfig Load(const std::filesystem::path &path);
  static DeskConfig FromJson(const nlohmann::json &j, const std::filesystem::path &base_dir);
  nlohmann::json ToJson() const;
  std::filesystem::path Resolve(const std::string &relative) const;
  void Validate() const;
};

struct DeskGraph {
  GraphSymbols syms;
  ClassLabelSet classes;
  std::shared_ptr<const RecognitionGraph> graph;
  std::map<std::string, std::shared_ptr<const Fst>> contact_fsts;  // by user

  // Binds every class to the user's contact FST. Throws DataError for a
  // user without contacts.
  ClassBinding BindingFor(const std::string &user) const;
  std::vector<std::string> Words(const std::vector<Label> &labels) const;
};

DeskGraph BuildDeskGraph(const DeskConfig &config);
void WriteDeskGraph(const DeskGraph &graph, const std::filesystem::path &dir);
DeskGraph ReadDeskGraph(const std::filesystem::path &dir);

std::vector<Utterance> LoadUtterances(const std::filesystem::path &path);

// Scores for the utterance at position `index` of its file. The seed is
// derived from (simulation.seed, index) so every configuration sees the
// same matrices.
ScoreMatrix UtteranceScores(const Utterance &utt, const SymbolTable &phones,
                            const SimulationConfig &simulation, size_t index);

std::shared_ptr<const PublicCache> BuildPublicCache(const DeskGraph &graph,
                                                    const PrecomposeConfig &config,
                                                    const std::vector<Utterance> &warmup,
                                                    const DecodeConfig &decode,
                                                    const SimulationConfig &simulation,
                                                    PrecomposeStats *stats);

struct UtteranceResult {
  std::string id;
  std::string user;
  int session = 0;
  int turn = 0;  // 1-based position within the session
  bool found = false;
  std::vector<std::string> words;
  double cost = 0.0;
  Metrics metrics;
  std::string error;  // non-empty if decoding threw
};

struct ConfigurationResult {
  std::string name;
  PrecomposeStats precompose;
  size_t public_states = 0;
  size_t public_expanded = 0;
  size_t public_arcs = 0;
  size_t bytes_public = 0;
  std::vector<UtteranceResult> utterances;  // input order
  std::vector<size_t> session_private_bytes;  // peak per session

  EditCounts edits;
  uint64_t otf_expansions = 0;
  uint64_t public_hits = 0;
  uint64_t private_hits = 0;
  std::vector<double> mean_otf_per_turn;  // index 0 = turn 1
  double marginal_bytes_per_session = 0.0;
  size_t errors = 0;
  size_t no_hypothesis = 0;
  double rtf_p50 = 0.0;
  double rtf_p95 = 0.0;
  int64_t peak_live_private_bytes = 0;

  nlohmann::json ToJson(bool include_wall_time, int concurrency) const;
};

// Decodes `utts` grouped into per-user sessions of plan.session_length
// turns on plan.threads workers sharing `cache`.
ConfigurationResult RunConfiguration(const std::string &name, const DeskGraph &graph,
                                     std::shared_ptr<const PublicCache> cache,
                                     const std::vector<Utterance> &utts, const BenchPlan &plan,
                                     const DecodeConfig &decode,
                                     const SimulationConfig &simulation);

struct BenchReport {
  nlohmann::json config;
  std::vector<ConfigurationResult> configurations;
  int concurrency = 10;

  // Wall-time fields are omitted when `include_wall_time` is false, which
  // makes reports byte-comparable across runs.
  nlohmann::json ToJson(bool include_wall_time = true) const;
};

BenchReport RunBench(const DeskConfig &config, const DeskGraph &graph);

struct ScoreRow {
  std::string configuration;
  EditCounts edits;
};

// Scores every configuration of a report against references. Throws
// DataError listing ids missing on either side.
std::vector<ScoreRow> ScoreReport(const nlohmann::json &report,
                                  const std::vector<Utterance> &references);

}  // namespace pcfst

#endif  // PCFST_HARNESS_H_
