// tests/test-compose.cc

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

#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pcfst/compose.h"
#include "pcfst/errors.h"
#include "pcfst/fst-io.h"
#include "pcfst/fst-ops.h"
#include "test-util.h"

using namespace pcfst;
using namespace pcfst::testing;

namespace {

struct Path {
  LabelString in, out;
};

// Every successful path of an acyclic machine, with multiplicity.
std::vector<Path> AllPaths(const Fst &fst) {
  std::vector<Path> out;
  std::vector<std::pair<StateId, Path>> stack{{fst.Start(), {}}};
  while (!stack.empty()) {
    auto [s, p] = stack.back();
    stack.pop_back();
    if (fst.IsFinal(s)) out.push_back(p);
    for (const Arc &a : fst.Arcs(s)) {
      Path q = p;
      if (a.ilabel != kEpsilon) q.in.push_back(a.ilabel);
      if (a.olabel != kEpsilon) q.out.push_back(a.olabel);
      stack.push_back({a.nextstate, q});
    }
  }
  return out;
}

// Relational composition of two transducers given as path maps.
PathMap ComposeTransducers(const PathMap &a, const PathMap &b) {
  std::multimap<LabelString, std::pair<LabelString, double>> by_input;
  for (const auto &[key, w] : b) by_input.emplace(key.first, std::make_pair(key.second, w));
  PathMap out;
  for (const auto &[key, w] : a) {
    auto [lo, hi] = by_input.equal_range(key.second);
    for (auto it = lo; it != hi; ++it) AddPath(&out, {key.first, it->second.first}, w + it->second.second);
  }
  return out;
}

// Lazy exploration of a pair composition through ExpandPairState.
template <class View>
StaticComposition<typename View::State> ComposeLazily(const Fst &t1, const View &t2) {
  typedef typename View::State S;
  std::map<PairState<S>, StateId> ids;
  std::vector<PairState<S>> states;
  FstBuilder b;
  auto intern = [&](const PairState<S> &p) {
    auto [it, inserted] = ids.emplace(p, static_cast<StateId>(states.size()));
    if (inserted) {
      states.push_back(p);
      b.AddState();
    }
    return it->second;
  };
  b.SetStart(intern(ComposeStart(t1, t2)));
  for (size_t i = 0; i < states.size(); ++i) {
    PairExpansion<S> e = ExpandPairState(states[i], t1, t2);
    for (const auto &a : e.arcs)
      b.AddArc(static_cast<StateId>(i), {a.ilabel, a.olabel, a.weight, intern(a.next)});
    b.SetFinal(static_cast<StateId>(i), e.final);
  }
  return {std::move(b).Build(), std::move(states)};
}

}  // namespace

TEST_CASE("filter transition table") {
  using F = FilterState;
  using M = MoveType;
  CHECK(FilterTransition(F::kAny, M::kMatch) == F::kAny);
  CHECK(FilterTransition(F::kEps1Only, M::kMatch) == F::kAny);
  CHECK(FilterTransition(F::kEps2Only, M::kMatch) == F::kAny);
  CHECK(FilterTransition(F::kAny, M::kEpsEps) == F::kAny);
  CHECK(FilterTransition(F::kEps1Only, M::kEpsEps) == F::kBlocked);
  CHECK(FilterTransition(F::kEps2Only, M::kEpsEps) == F::kBlocked);
  CHECK(FilterTransition(F::kAny, M::kEps1) == F::kEps1Only);
  CHECK(FilterTransition(F::kEps1Only, M::kEps1) == F::kEps1Only);
  CHECK(FilterTransition(F::kEps2Only, M::kEps1) == F::kBlocked);
  CHECK(FilterTransition(F::kAny, M::kEps2) == F::kEps2Only);
  CHECK(FilterTransition(F::kEps2Only, M::kEps2) == F::kEps2Only);
  CHECK(FilterTransition(F::kEps1Only, M::kEps2) == F::kBlocked);
  for (M m : {M::kMatch, M::kEpsEps, M::kEps1, M::kEps2})
    CHECK(FilterTransition(F::kBlocked, m) == F::kBlocked);
}

TEST_CASE("hand-built composition") {
  // a:x / b:eps then x:X
  Fst t1 = ReadTextFst("0 1 1 10 0.5\n1 2 2 0 0.25\n2 0\n");
  Fst t2 = ReadTextFst("0 1 10 20 1\n1 0.125\n");
  auto c = ComposeStatic(t1, StaticView(t2));
  PathMap paths = EnumeratePaths(c.fst);
  REQUIRE(paths.size() == 1);
  CHECK(paths.begin()->first == StringPair{{1, 2}, {20}});
  CHECK(paths.begin()->second == 1.875);
}

TEST_CASE("epsilons on both sides yield one path per pair") {
  Fst t1 = ReadTextFst("0 1 1 0\n1 2 2 7\n2\n");
  Fst t2 = ReadTextFst("0 1 0 5\n1 2 7 7\n2\n");
  auto c = ComposeStatic(t1, StaticView(t2));
  CHECK(AllPaths(c.fst).size() == 1);
}

TEST_CASE("lazy expansion equals static composition on random pairs") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    RandomFstOptions o;
    o.acyclic = i % 2 == 0;
    Fst t1 = RandomFst(rng, o);
    Fst t2 = RandomFst(rng, o);
    auto lazy = ComposeLazily(t1, StaticView(t2));
    auto full = ComposeStatic(t1, StaticView(t2));
    std::string why;
    CHECK_MESSAGE(SameUnderKeys(lazy.fst, lazy.states, full.fst, full.states, &why), why);
  }
}

TEST_CASE("composition realizes the relational composition") {
  std::mt19937_64 rng(5);
  RandomFstOptions o;
  o.acyclic = true;
  for (int i = 0; i < 300; ++i) {
    Fst t1 = RandomFst(rng, o);
    Fst t2 = RandomFst(rng, o);
    auto c = ComposeStatic(t1, StaticView(t2));
    CHECK(EnumeratePaths(c.fst) == ComposeTransducers(EnumeratePaths(t1), EnumeratePaths(t2)));
  }
}

TEST_CASE("each matching pair of paths contributes exactly one composed path") {
  std::mt19937_64 rng(9);
  RandomFstOptions o;
  o.acyclic = true;
  o.eps_in = 0.4;
  o.eps_out = 0.4;
  for (int i = 0; i < 300; ++i) {
    Fst t1 = RandomFst(rng, o);
    Fst t2 = RandomFst(rng, o);
    std::vector<Path> p1 = AllPaths(t1), p2 = AllPaths(t2);
    size_t pairs = 0;
    for (const Path &a : p1)
      for (const Path &b : p2)
        if (a.out == b.in) ++pairs;
    auto c = ComposeStatic(t1, StaticView(t2));
    CHECK(AllPaths(c.fst).size() == pairs);
  }
}

TEST_CASE("composed states never carry the blocked filter state") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    Fst t1 = RandomFst(rng, {});
    Fst t2 = RandomFst(rng, {});
    auto c = ComposeStatic(t1, StaticView(t2));
    for (const auto &s : c.states) CHECK(s.filter != FilterState::kBlocked);
  }
}

TEST_CASE("state bound raises a resource error") {
  Fst t1 = ReadTextFst("0 1 1 1\n1 2 1 1\n2 3 1 1\n3\n");
  Fst t2 = ReadTextFst("0 0 1 1\n0\n");
  CHECK_THROWS_AS(ComposeStatic(t1, StaticView(t2), 2), ResourceError);
  CHECK_NOTHROW(ComposeStatic(t1, StaticView(t2), 4));
}

TEST_CASE("expansions are sorted and deterministic") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    Fst t1 = RandomFst(rng, {});
    Fst t2 = RandomFst(rng, {});
    StaticView view(t2);
    auto e1 = ExpandPairState(ComposeStart(t1, view), t1, view);
    auto e2 = ExpandPairState(ComposeStart(t1, view), t1, view);
    CHECK(e1.arcs == e2.arcs);
    CHECK(std::is_sorted(e1.arcs.begin(), e1.arcs.end(), PairArcLess<StateId>));
  }
}
