// pcfst/precompose.cc

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

#include "pcfst/precompose.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <utility>

#include "pcfst/errors.h"

namespace pcfst {

const char *MethodName(PrecomposeMethod method) {
  switch (method) {
    case PrecomposeMethod::kNone: return "none";
    case PrecomposeMethod::kBfs: return "bfs";
    case PrecomposeMethod::kWarmup: return "warmup";
    case PrecomposeMethod::kBoth: return "both";
  }
  return "?";
}

PrecomposeMethod ParseMethod(const std::string &name) {
  if (name == "none") return PrecomposeMethod::kNone;
  if (name == "bfs") return PrecomposeMethod::kBfs;
  if (name == "warmup") return PrecomposeMethod::kWarmup;
  if (name == "both") return PrecomposeMethod::kBoth;
  throw ConfigError("unknown pre-composition method '" + name + "'");
}

void PrecomposeConfig::Validate() const {
  if (bfs_depth < 0) throw ConfigError("bfs_depth must be non-negative");
  if (state_budget == 0) throw ConfigError("state_budget must be positive");
}

bool IsPrecomposable(const ReplaceState &q2, const Fst &root, const ClassLabelSet &classes) {
  if (!q2.IsRoot()) return false;
  return !HasClassArc(root, classes, q2.root);
}

ClassBinding PlaceholderBinding(const RecognitionGraph &graph) {
  Label temp = kNoLabel;
  if (const auto &syms = graph.root().OutputSymbols()) temp = syms->Find("<temp>");
  if (temp == kNoLabel || temp == kEpsilon) {
    temp = 1;
    for (StateId s = 0; s < graph.root().NumStates(); ++s)
      for (const Arc &a : graph.root().Arcs(s)) temp = std::max(temp, a.olabel + 1);
    for (Label l : graph.classes().Labels()) temp = std::max(temp, l + 1);
  }
  auto fst = std::make_shared<const Fst>(MakePlaceholderClassFst(temp));
  return ClassBinding::Uniform(graph.classes(), fst);
}

ClassBinding EmptyBinding(const RecognitionGraph &graph) {
  auto fst = std::make_shared<const Fst>(MakeEmptyFst());
  return ClassBinding::Uniform(graph.classes(), fst);
}

namespace {

// Interns the destinations of `pe` and stores the expansion under `id`.
void StoreExpansion(PublicCache *cache, StateId id, const PairExpansion<ReplaceState> &pe) {
  Expansion e;
  e.final = pe.final;
  e.arcs.reserve(pe.arcs.size());
  for (const PairArc<ReplaceState> &a : pe.arcs)
    e.arcs.push_back({a.ilabel, a.olabel, a.weight, cache->Intern(a.next)});
  cache->Store(id, std::move(e));
}

bool SameExpansion(const PairExpansion<ReplaceState> &pe, const Expansion &e,
                   const Session &session) {
  if (pe.final != e.final || pe.arcs.size() != e.arcs.size()) return false;
  for (size_t i = 0; i < pe.arcs.size(); ++i) {
    const PairArc<ReplaceState> &a = pe.arcs[i];
    const CachedArc &b = e.arcs[i];
    if (a.ilabel != b.ilabel || a.olabel != b.olabel || a.weight != b.weight ||
        a.next != session.Key(b.nextstate))
      return false;
  }
  return true;
}

}  // namespace

void BfsPrecompose(PublicCache *cache, const PrecomposeConfig &config, PrecomposeStats *stats) {
  config.Validate();
  const RecognitionGraph &graph = cache->graph();
  const ClassBinding placeholder = PlaceholderBinding(graph);
  const ReplaceView view(graph.root(), graph.classes(), placeholder);

  const StateId start = cache->Intern(graph.StartKey());
  std::vector<int> depth(cache->NumStates(), -1);
  depth[start] = 0;
  std::deque<StateId> queue{start};
  while (!queue.empty()) {
    const StateId id = queue.front();
    queue.pop_front();
    const int d = depth[id];
    if (d >= config.bfs_depth) continue;
    const ComposedStateKey key = cache->Key(id);
    if (!graph.IsPrecomposable(key.q2)) continue;
    if (!cache->IsExpanded(id)) {
      if (static_cast<size_t>(cache->NumStates()) >= config.state_budget) {
        stats->budget_exhausted = true;
        break;
      }
      StoreExpansion(cache, id, ExpandPairState(key, graph.t1(), view));
      ++stats->bfs_expanded;
      stats->bfs_max_depth = std::max(stats->bfs_max_depth, d + 1);
    }
    if (depth.size() < static_cast<size_t>(cache->NumStates()))
      depth.resize(cache->NumStates(), -1);
    for (const CachedArc &arc : cache->Lookup(id)->arcs) {
      if (depth[arc.nextstate] != -1) continue;
      depth[arc.nextstate] = d + 1;
      queue.push_back(arc.nextstate);
    }
  }
}

void WarmupPrecompose(std::shared_ptr<PublicCache> cache, const std::vector<ScoreMatrix> &utterances,
                      const DecodeConfig &decode_config, const PrecomposeConfig &config,
                      PrecomposeStats *stats) {
  config.Validate();
  const RecognitionGraph &graph = cache->graph();
  const ClassBinding empty = EmptyBinding(graph);
  const ClassBinding placeholder = PlaceholderBinding(graph);
  const ReplaceView view(graph.root(), graph.classes(), placeholder);
  cache->Intern(graph.StartKey());

  for (size_t u = 0; u < utterances.size(); ++u) {
    ++stats->warmup_utterances;
    std::vector<std::pair<ComposedStateKey, PairExpansion<ReplaceState>>> promote;
    {
      std::unique_ptr<Session> session = Session::ForPrecomposition(cache, empty);
      try {
        Decode(utterances[u], session.get(), decode_config);
      } catch (const DataError &e) {
        stats->warmup_errors.push_back("utterance " + std::to_string(u) + ": " + e.what());
        continue;
      } catch (const ResourceError &e) {
        stats->warmup_errors.push_back("utterance " + std::to_string(u) + ": " + e.what());
        continue;
      }
      for (StateId id : session->PrivatelyExpandedIds()) {
        const ComposedStateKey key = session->Key(id);
        if (!graph.IsPrecomposable(key.q2)) {
          ++stats->warmup_discarded;
          continue;
        }
        PairExpansion<ReplaceState> pe = ExpandPairState(key, graph.t1(), view);
        if (!SameExpansion(pe, session->Expand(id), *session))
          throw InvariantError("warm-up expansion of " + KeyToString(key) +
                               " differs from its recomputation");
        promote.emplace_back(key, std::move(pe));
      }
    }
    for (const auto &[key, pe] : promote) {
      if (static_cast<size_t>(cache->NumStates()) >= config.state_budget) {
        stats->budget_exhausted = true;
        return;
      }
      const StateId id = cache->Intern(key);
      if (cache->IsExpanded(id)) continue;
      StoreExpansion(cache.get(), id, pe);
      ++stats->warmup_promoted;
    }
  }
}

std::shared_ptr<PublicCache> Precompose(std::shared_ptr<const RecognitionGraph> graph,
                                        const PrecomposeConfig &config,
                                        const std::vector<ScoreMatrix> &warmup_utterances,
                                        const DecodeConfig &decode_config,
                                        PrecomposeStats *stats) {
  config.Validate();
  auto t0 = std::chrono::steady_clock::now();
  auto cache = std::make_shared<PublicCache>(graph);
  cache->Intern(graph->StartKey());
  if (config.method == PrecomposeMethod::kBfs || config.method == PrecomposeMethod::kBoth)
    BfsPrecompose(cache.get(), config, stats);
  if (config.method == PrecomposeMethod::kWarmup || config.method == PrecomposeMethod::kBoth)
    WarmupPrecompose(cache, warmup_utterances, decode_config, config, stats);
  cache->Seal();
  stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache;
}

}  // namespace pcfst
