// pcfst/precompose.h

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

// Offline construction of the public cache layer.
//
// Only composed states whose replace component is ROOT(q) with no class
// out-arc at q are ever stored: their expansion cannot depend on which
// class FSTs a user binds. Two strategies fill the cache. BfsPrecompose()
// walks the composed graph breadth-first from the start state up to a
// distance; WarmupPrecompose() decodes sample utterances with every class
// bound to the empty FST and promotes the states the decoder expanded.

#ifndef PCFST_PRECOMPOSE_H_
#define PCFST_PRECOMPOSE_H_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "pcfst/cache.h"
#include "pcfst/decoder.h"
#include "pcfst/replace.h"
#include "pcfst/scores.h"

namespace pcfst {

enum class PrecomposeMethod { kNone, kBfs, kWarmup, kBoth };

const char *MethodName(PrecomposeMethod method);
// Accepts "none", "bfs", "warmup", "both"; throws ConfigError otherwise.
PrecomposeMethod ParseMethod(const std::string &name);

struct PrecomposeConfig {
  PrecomposeMethod method = PrecomposeMethod::kBfs;
  int bfs_depth = 5;
  // Maximum number of public states; checked before every expansion.
  size_t state_budget = 5000000;

  void Validate() const;
};

struct PrecomposeStats {
  size_t bfs_expanded = 0;
  int bfs_max_depth = 0;  // largest distance of an expanded state + 1
  size_t warmup_utterances = 0;
  size_t warmup_promoted = 0;
  size_t warmup_discarded = 0;  // expanded states failing the predicate
  std::vector<std::string> warmup_errors;
  bool budget_exhausted = false;
  double seconds = 0.0;
};

// True iff `q2` is ROOT(q) and no out-arc of root state q carries a class
// label.
bool IsPrecomposable(const ReplaceState &q2, const Fst &root, const ClassLabelSet &classes);

// Binds every class to a one-word "<temp>" acceptor. The label is looked up
// in the root's output symbols, or chosen above every root label otherwise.
ClassBinding PlaceholderBinding(const RecognitionGraph &graph);
// Binds every class to an FST that accepts nothing.
ClassBinding EmptyBinding(const RecognitionGraph &graph);

// Breadth-first expansion of `cache` (unsealed) from the composed start
// state. A state at distance d is expanded iff it is precomposable, d <
// bfs_depth and the budget allows; destinations of expanded states are
// interned either way. Already expanded states are traversed, not
// recomputed.
void BfsPrecompose(PublicCache *cache, const PrecomposeConfig &config, PrecomposeStats *stats);

// Decodes each utterance with a fresh session over `cache` bound to the
// empty class FSTs and promotes every precomposable state that session
// expanded, recomputing its arcs under the placeholder binding. Throws
// InvariantError if a recomputed expansion differs from the decoded one.
// Errors raised while decoding an utterance are recorded in `stats` and
// the utterance is skipped.
void WarmupPrecompose(std::shared_ptr<PublicCache> cache, const std::vector<ScoreMatrix> &utterances,
                      const DecodeConfig &decode_config, const PrecomposeConfig &config,
                      PrecomposeStats *stats);

// Runs the configured method(s) on a fresh cache and seals it.
std::shared_ptr<PublicCache> Precompose(std::shared_ptr<const RecognitionGraph> graph,
                                        const PrecomposeConfig &config,
                                        const std::vector<ScoreMatrix> &warmup_utterances,
                                        const DecodeConfig &decode_config,
                                        PrecomposeStats *stats);

}  // namespace pcfst

#endif  // PCFST_PRECOMPOSE_H_
