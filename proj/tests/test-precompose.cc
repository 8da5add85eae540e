// tests/test-precompose.cc

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

#include <deque>
#include <random>
#include <set>

#include "doctest.h"
#include "pcfst/compose.h"
#include "pcfst/decoder.h"
#include "pcfst/errors.h"
#include "pcfst/fst-io.h"
#include "pcfst/fst-ops.h"
#include "pcfst/precompose.h"
#include "pcfst/scores.h"
#include "test-util.h"

using namespace pcfst;
using namespace pcfst::testing;

namespace {

std::shared_ptr<const RecognitionGraph> GraphOf(const RandomTriple &t, bool transform = true) {
  auto root = transform ? std::make_shared<const Fst>(InsertEpsilonBeforeClass(*t.root, t.classes))
                        : t.root;
  return std::make_shared<const RecognitionGraph>(t.t1, root, t.classes);
}

ClassBinding BindingOf(const RandomTriple &t) {
  ClassBinding b;
  b.Bind(kTripleClass, t.class_fst);
  return b;
}

// Keys a depth-limited BFS over the placeholder composition must expand:
// precomposable states at arc distance below `depth`, where only
// precomposable states are traversed.
std::set<ComposedStateKey> BfsOracle(const RecognitionGraph &graph, int depth) {
  ClassBinding placeholder = PlaceholderBinding(graph);
  ReplaceView view(graph.root(), graph.classes(), placeholder);
  auto full = ComposeStatic(graph.t1(), view);
  std::vector<int> dist(full.states.size(), -1);
  std::deque<StateId> queue{full.fst.Start()};
  dist[full.fst.Start()] = 0;
  std::set<ComposedStateKey> out;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    if (dist[s] >= depth || !graph.IsPrecomposable(full.states[s].q2)) continue;
    out.insert(full.states[s]);
    for (const Arc &a : full.fst.Arcs(s))
      if (dist[a.nextstate] < 0) {
        dist[a.nextstate] = dist[s] + 1;
        queue.push_back(a.nextstate);
      }
  }
  return out;
}

std::set<ComposedStateKey> ExpandedKeys(const PublicCache &cache) {
  std::set<ComposedStateKey> out;
  for (StateId id = 0; id < cache.NumStates(); ++id)
    if (cache.IsExpanded(id)) out.insert(cache.Key(id));
  return out;
}

std::vector<ScoreMatrix> RandomUtterances(std::mt19937_64 &rng, int count) {
  std::vector<ScoreMatrix> out;
  SimulationConfig sim;
  sim.frames_per_phone = 1;
  sim.noise = 1.0;
  for (int u = 0; u < count; ++u) {
    std::vector<Label> phones;
    int len = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < len; ++k) phones.push_back(std::uniform_int_distribution<Label>(1, 3)(rng));
    sim.seed = rng();
    out.push_back(SimulateScores(phones, 4, sim));
  }
  return out;
}

}  // namespace

TEST_CASE("method names and configuration") {
  for (auto m : {PrecomposeMethod::kNone, PrecomposeMethod::kBfs, PrecomposeMethod::kWarmup,
                 PrecomposeMethod::kBoth})
    CHECK(ParseMethod(MethodName(m)) == m);
  CHECK_THROWS_AS(ParseMethod("dfs"), ConfigError);
  PrecomposeConfig c;
  c.bfs_depth = -1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c.bfs_depth = 0;
  c.state_budget = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("precomposability predicate") {
  Fst root = ReadTextFst("0 1 1 1\n1 2 9 9\n1 2 2 2\n2\n");
  ClassLabelSet classes;
  classes.Add(9);
  CHECK(IsPrecomposable(ReplaceState::Root(0), root, classes));
  CHECK_FALSE(IsPrecomposable(ReplaceState::Root(1), root, classes));
  CHECK(IsPrecomposable(ReplaceState::Root(2), root, classes));
  CHECK_FALSE(IsPrecomposable(ReplaceState::Inside(9, 0, 2), root, classes));
  RecognitionGraph graph(std::make_shared<const Fst>(ReadTextFst("0 0 1 1\n0\n")),
                         std::make_shared<const Fst>(root), classes);
  for (StateId q = 0; q < root.NumStates(); ++q)
    CHECK(graph.IsPrecomposable(ReplaceState::Root(q)) ==
          IsPrecomposable(ReplaceState::Root(q), root, classes));
}

TEST_CASE("breadth-first pre-composition expands exactly the oracle set") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 200; ++i) {
    RandomTriple t = MakeRandomTriple(rng, i % 2 == 0);
    auto graph = GraphOf(t);
    const int depth = i % 7;
    auto cache = std::make_shared<PublicCache>(graph);
    PrecomposeConfig config;
    config.bfs_depth = depth;
    PrecomposeStats stats;
    BfsPrecompose(cache.get(), config, &stats);
    CHECK(ExpandedKeys(*cache) == BfsOracle(*graph, depth));
    CHECK(stats.bfs_expanded == cache->NumExpanded());
    CHECK(stats.bfs_max_depth <= depth);
    CHECK_NOTHROW(cache->Seal());
  }
}

TEST_CASE("deeper searches expand supersets") {
  std::mt19937_64 rng(67);
  for (int i = 0; i < 50; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    std::set<ComposedStateKey> prev;
    for (int d = 0; d < 8; ++d) {
      PrecomposeStats stats;
      PrecomposeConfig config;
      config.bfs_depth = d;
      auto cache = Precompose(graph, config, {}, DecodeConfig(), &stats);
      std::set<ComposedStateKey> now = ExpandedKeys(*cache);
      CHECK(std::includes(now.begin(), now.end(), prev.begin(), prev.end()));
      prev = now;
    }
  }
}

TEST_CASE("state budget stops pre-composition") {
  std::mt19937_64 rng(71);
  int exhausted = 0;
  for (int i = 0; i < 50; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    PrecomposeConfig config;
    config.bfs_depth = 20;
    config.state_budget = 3;
    PrecomposeStats stats;
    auto cache = Precompose(GraphOf(t), config, {}, DecodeConfig(), &stats);
    if (stats.budget_exhausted) {
      ++exhausted;
      CHECK(cache->NumExpanded() < cache->NumStates());
    }
    CHECK(cache->sealed());
  }
  CHECK(exhausted > 0);
}

TEST_CASE("a class arc on the start state blocks pre-composition until isolated") {
  // Root start state carries both a word arc and a class arc.
  auto t1 = std::make_shared<const Fst>(ReadTextFst("0 0 1 1\n0 0 2 2\n0\n"));
  Fst raw = ReadTextFst("0 1 9 9 1.5\n0 1 1 1 2.25\n1 1 2 2 0.5\n1 0.125\n");
  ClassLabelSet classes;
  classes.Add(9);
  PrecomposeConfig config;
  config.bfs_depth = 5;

  RecognitionGraph before_graph(t1, std::make_shared<const Fst>(raw), classes);
  auto before = std::make_shared<PublicCache>(
      std::make_shared<const RecognitionGraph>(before_graph));
  PrecomposeStats s1;
  BfsPrecompose(before.get(), config, &s1);
  CHECK(s1.bfs_expanded == 0);

  Fst transformed = InsertEpsilonBeforeClass(raw, classes);
  auto after = std::make_shared<PublicCache>(std::make_shared<const RecognitionGraph>(
      t1, std::make_shared<const Fst>(transformed), classes));
  PrecomposeStats s2;
  BfsPrecompose(after.get(), config, &s2);
  CHECK(s2.bfs_expanded >= 1);
  CHECK(ShortestPath(transformed)->weight == ShortestPath(raw)->weight);
}

TEST_CASE("warm-up promotes only precomposable states and seals") {
  std::mt19937_64 rng(73);
  int promoted = 0;
  for (int i = 0; i < 100; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    PrecomposeConfig config;
    config.method = PrecomposeMethod::kWarmup;
    PrecomposeStats stats;
    auto cache = Precompose(graph, config, RandomUtterances(rng, 5), DecodeConfig(), &stats);
    CHECK(cache->sealed());
    CHECK(stats.warmup_utterances == 5);
    CHECK(stats.warmup_promoted == cache->NumExpanded());
    promoted += static_cast<int>(stats.warmup_promoted);
    for (StateId id = 0; id < cache->NumStates(); ++id) {
      CHECK(cache->Key(id).q2.IsRoot());
      if (cache->IsExpanded(id)) CHECK(graph->IsPrecomposable(cache->Key(id).q2));
    }
  }
  CHECK(promoted > 0);
}

TEST_CASE("combined pre-composition contains the breadth-first set") {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 50; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    std::vector<ScoreMatrix> utts = RandomUtterances(rng, 4);
    PrecomposeStats sb, sw;
    PrecomposeConfig cb;
    cb.bfs_depth = 3;
    PrecomposeConfig cw = cb;
    cw.method = PrecomposeMethod::kBoth;
    auto bfs = ExpandedKeys(*Precompose(graph, cb, utts, DecodeConfig(), &sb));
    auto both = ExpandedKeys(*Precompose(graph, cw, utts, DecodeConfig(), &sw));
    CHECK(std::includes(both.begin(), both.end(), bfs.begin(), bfs.end()));
  }
}

TEST_CASE("hypotheses do not depend on the pre-composition method") {
  std::mt19937_64 rng(83);
  for (int i = 0; i < 100; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    std::vector<ScoreMatrix> warm = RandomUtterances(rng, 4);
    std::vector<ScoreMatrix> test = RandomUtterances(rng, 3);
    DecodeConfig decode;
    decode.beam = 3.0;
    decode.max_active = 3;
    std::vector<std::vector<std::pair<bool, std::vector<Label>>>> results;
    std::vector<std::vector<double>> costs;
    for (auto m : {PrecomposeMethod::kNone, PrecomposeMethod::kBfs, PrecomposeMethod::kWarmup,
                   PrecomposeMethod::kBoth}) {
      PrecomposeConfig config;
      config.method = m;
      config.bfs_depth = 2;
      PrecomposeStats stats;
      auto cache = Precompose(graph, config, warm, decode, &stats);
      Session session(cache, BindingOf(t));
      results.emplace_back();
      costs.emplace_back();
      for (const ScoreMatrix &s : test) {
        Hypothesis h = Decode(s, &session, decode);
        results.back().push_back({h.found, h.words});
        costs.back().push_back(h.cost.Value());
      }
    }
    for (size_t k = 1; k < results.size(); ++k) {
      CHECK(results[k] == results[0]);
      CHECK(costs[k] == costs[0]);
    }
  }
}
