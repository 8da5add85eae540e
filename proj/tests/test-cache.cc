// tests/test-cache.cc

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

#include <random>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "pcfst/cache.h"
#include "pcfst/compose.h"
#include "pcfst/errors.h"
#include "pcfst/fst-io.h"
#include "pcfst/precompose.h"
#include "test-util.h"

using namespace pcfst;
using namespace pcfst::testing;

namespace {

std::shared_ptr<const RecognitionGraph> GraphOf(const RandomTriple &t) {
  return std::make_shared<const RecognitionGraph>(
      t.t1, std::make_shared<const Fst>(InsertEpsilonBeforeClass(*t.root, t.classes)),
      t.classes);
}

ClassBinding BindingOf(const RandomTriple &t) {
  ClassBinding b;
  b.Bind(kTripleClass, t.class_fst);
  return b;
}

std::shared_ptr<const PublicCache> BfsCache(std::shared_ptr<const RecognitionGraph> graph,
                                            int depth) {
  auto cache = std::make_shared<PublicCache>(graph);
  PrecomposeConfig config;
  config.bfs_depth = depth;
  PrecomposeStats stats;
  BfsPrecompose(cache.get(), config, &stats);
  cache->Seal();
  return cache;
}

// Small fixed graph: T1 maps phone 1 to word 1 and phone 2 to word 2,
// root accepts "1 C" where C binds to the class FST.
struct Fixture {
  std::shared_ptr<const RecognitionGraph> graph;
  ClassBinding binding;
  Fixture() {
    auto t1 = std::make_shared<const Fst>(ReadTextFst("0 0 1 1\n0 0 2 2\n0\n"));
    auto root = std::make_shared<const Fst>(
        InsertEpsilonBeforeClass(ReadTextFst("0 1 1 1 0.5\n1 2 9 9\n2\n"), Classes()));
    graph = std::make_shared<const RecognitionGraph>(t1, root, Classes());
    binding.Bind(9, std::make_shared<const Fst>(ReadTextFst("0 1 2 2 0.25\n1\n")));
  }
  static ClassLabelSet Classes() {
    ClassLabelSet c;
    c.Add(9);
    return c;
  }
};

}  // namespace

TEST_CASE("seal rejects personalized and non-precomposable states") {
  Fixture f;
  {
    PublicCache cache(f.graph);
    cache.Intern({0, ReplaceState::Inside(9, 0, 2), FilterState::kAny});
    CHECK_THROWS_AS(cache.Seal(), InvariantError);
  }
  {
    PublicCache cache(f.graph);
    // State 1 of the root has the (isolated) class arc.
    StateId class_state = kNoStateId;
    for (StateId s = 0; s < f.graph->root().NumStates(); ++s)
      if (HasClassArc(f.graph->root(), f.graph->classes(), s)) class_state = s;
    REQUIRE(class_state != kNoStateId);
    StateId id = cache.Intern({0, ReplaceState::Root(class_state), FilterState::kAny});
    cache.Store(id, Expansion{});
    CHECK_THROWS_AS(cache.Seal(), InvariantError);
  }
  {
    PublicCache cache(f.graph);
    StateId id = cache.Intern(f.graph->StartKey());
    cache.Store(id, Expansion{{{1, 1, Weight::One(), 7}}, Weight::Zero()});
    CHECK_THROWS_AS(cache.Seal(), InvariantError);
  }
}

TEST_CASE("sealed cache refuses mutation and sessions need a sealed cache") {
  Fixture f;
  auto cache = std::make_shared<PublicCache>(f.graph);
  CHECK_THROWS_AS(Session(cache, f.binding), ConfigError);
  cache->Seal();
  CHECK(cache->sealed());
  CHECK_THROWS_AS(cache->Intern(f.graph->StartKey()), ConfigError);
  CHECK_THROWS_AS(cache->Store(0, Expansion{}), ConfigError);
  CHECK_NOTHROW(Session(cache, f.binding));
}

TEST_CASE("every lookup counts exactly one of public hit, private hit or expansion") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    auto cache = BfsCache(graph, i % 4);
    Session session(cache, BindingOf(t));
    uint64_t calls = 0;
    std::vector<StateId> todo{session.Start()};
    std::set<StateId> seen{todo[0]};
    while (!todo.empty()) {
      StateId id = todo.back();
      todo.pop_back();
      const Expansion &e = session.Expand(id);
      ++calls;
      session.Expand(id);
      ++calls;
      for (const CachedArc &a : e.arcs)
        if (seen.insert(a.nextstate).second) todo.push_back(a.nextstate);
    }
    Metrics m = session.metrics();
    CHECK(m.Lookups() == calls);
    CHECK(m.otf_expansions == session.NumPrivateExpanded());
    CHECK(m.otf_expansions + cache->NumExpanded() >= seen.size());
  }
}

TEST_CASE("two-layer exploration is identical to static composition") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    RandomTriple t = MakeRandomTriple(rng, i % 2 == 0);
    auto graph = GraphOf(t);
    ClassBinding binding = BindingOf(t);
    auto cache = BfsCache(graph, i % 6);
    Session session(cache, binding);
    ExploredGraph lazy = ExploreSession(&session);
    ReplaceView view(graph->root(), graph->classes(), binding);
    auto full = ComposeStatic(graph->t1(), view);
    std::string why;
    CHECK_MESSAGE(SameUnderKeys(lazy.fst, lazy.keys, full.fst, full.states, &why), why);
  }
}

TEST_CASE("public expansions match what a session would compute") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    auto cache = BfsCache(graph, 3);
    ClassBinding binding = BindingOf(t);
    ReplaceView view(graph->root(), graph->classes(), binding);
    for (StateId id = 0; id < cache->NumStates(); ++id) {
      const Expansion *e = cache->Lookup(id);
      if (!e) continue;
      auto pe = ExpandPairState(cache->Key(id), graph->t1(), view);
      REQUIRE(pe.arcs.size() == e->arcs.size());
      CHECK(pe.final == e->final);
      for (size_t k = 0; k < pe.arcs.size(); ++k) {
        CHECK(pe.arcs[k].olabel == e->arcs[k].olabel);
        CHECK(pe.arcs[k].weight == e->arcs[k].weight);
        CHECK(pe.arcs[k].next == cache->Key(e->arcs[k].nextstate));
      }
    }
  }
}

TEST_CASE("sessions never modify the public cache") {
  std::mt19937_64 rng(43);
  RandomTriple t = MakeRandomTriple(rng, false);
  auto cache = BfsCache(GraphOf(t), 4);
  const uint64_t sum = cache->Checksum();
  CHECK(sum == cache->SealedChecksum());
  for (int k = 0; k < 3; ++k) {
    Session session(cache, BindingOf(t));
    ExploreSession(&session);
  }
  CHECK(cache->Checksum() == sum);
}

TEST_CASE("cache dump round trip") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto graph = GraphOf(t);
    auto cache = BfsCache(graph, 4);
    std::stringstream ss;
    cache->Write(ss);
    const std::string text = ss.str();
    std::stringstream in(text);
    auto back = PublicCache::Read(in, graph);
    CHECK(back->sealed());
    CHECK(back->Checksum() == cache->Checksum());
    CHECK(back->NumStates() == cache->NumStates());
    for (StateId id = 0; id < cache->NumStates(); ++id) {
      CHECK(back->Key(id) == cache->Key(id));
      CHECK(back->IsExpanded(id) == cache->IsExpanded(id));
      if (cache->IsExpanded(id)) CHECK(*back->Lookup(id) == *cache->Lookup(id));
    }
    if (text.size() > 40) {
      std::string corrupt = text;
      size_t pos = corrupt.size() / 2;
      corrupt[pos] = corrupt[pos] == '1' ? '2' : '1';
      std::stringstream bad(corrupt);
      CHECK_THROWS_AS(PublicCache::Read(bad, graph), DataError);
    }
  }
  std::stringstream junk("hello\n");
  Fixture f;
  CHECK_THROWS_AS(PublicCache::Read(junk, f.graph), DataError);
}

TEST_CASE("modeled memory accounting") {
  Fixture f;
  auto cache = std::make_shared<PublicCache>(f.graph);
  cache->Seal();
  CHECK(cache->ModeledBytes() == 0);
  {
    Session session(cache, f.binding);
    ExploreSession(&session);
    const size_t expected = kModelStateBytes * session.NumPrivateExpanded() +
                            kModelKeyBytes * session.NumPrivateStates();
    CHECK(session.PrivateBytes() >= expected);
    CHECK(cache->memory().Live() == static_cast<int64_t>(session.PrivateBytes()));
    Metrics m = session.End();
    CHECK(m.bytes_private > 0);
    CHECK(session.PrivateBytes() == 0);
    CHECK(cache->memory().Live() == 0);
    ExploreSession(&session);
  }
  CHECK(cache->memory().Live() == 0);
}

TEST_CASE("repeating an exploration inside a session expands nothing new") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 50; ++i) {
    RandomTriple t = MakeRandomTriple(rng, false);
    auto cache = BfsCache(GraphOf(t), 2);
    Session session(cache, BindingOf(t));
    ExploreSession(&session);
    const uint64_t before = session.metrics().otf_expansions;
    ExploreSession(&session);
    CHECK(session.metrics().otf_expansions == before);
  }
}

TEST_CASE("concurrent sessions see identical graphs") {
  std::mt19937_64 rng(59);
  RandomTriple t = MakeRandomTriple(rng, false);
  auto cache = BfsCache(GraphOf(t), 3);
  Session reference(cache, BindingOf(t));
  ExploredGraph expected = ExploreSession(&reference);
  std::vector<int> ok(8, 0);
  std::vector<std::thread> workers;
  for (int w = 0; w < 8; ++w)
    workers.emplace_back([&, w] {
      for (int k = 0; k < 20; ++k) {
        Session s(cache, BindingOf(t), w);
        ExploredGraph g = ExploreSession(&s);
        ok[w] += g.fst == expected.fst && g.keys == expected.keys;
      }
    });
  for (auto &th : workers) th.join();
  for (int v : ok) CHECK(v == 20);
}
