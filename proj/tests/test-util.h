// tests/test-util.h

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

// Reference implementations used only by the tests: random machine
// generators, brute-force path enumeration, relational composition and
// a trellis search over a statically composed graph.

#ifndef PCFST_TESTS_TEST_UTIL_H_
#define PCFST_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pcfst/cache.h"
#include "pcfst/compose.h"
#include "pcfst/fst.h"
#include "pcfst/replace.h"
#include "pcfst/scores.h"

namespace pcfst {
namespace testing {

typedef std::vector<Label> LabelString;
typedef std::pair<LabelString, LabelString> StringPair;
typedef std::map<StringPair, double> PathMap;

// Weights are multiples of 1/8 so every sum is exact in double precision.
inline Weight DyadicWeight(std::mt19937_64 &rng, int max_eighths = 24) {
  return Weight(std::uniform_int_distribution<int>(0, max_eighths)(rng) / 8.0);
}

struct RandomFstOptions {
  int max_states = 10;
  int max_arcs_per_state = 3;
  Label max_ilabel = 3;
  Label max_olabel = 3;
  double eps_in = 0.2;
  double eps_out = 0.2;
  bool acceptor = false;
  bool acyclic = false;
  double final_prob = 0.3;
  // Extra labels that may appear on arcs (e.g. class labels), used with
  // probability `extra_prob` as both input and output.
  std::vector<Label> extra_labels;
  double extra_prob = 0.0;
};

inline Fst RandomFst(std::mt19937_64 &rng, const RandomFstOptions &opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = std::uniform_int_distribution<int>(1, opt.max_states)(rng);
  FstBuilder b;
  for (int s = 0; s < n; ++s) b.AddState();
  b.SetStart(0);
  bool any_final = false;
  for (int s = 0; s < n; ++s) {
    if (unit(rng) < opt.final_prob || (s == n - 1 && !any_final)) {
      b.SetFinal(s, DyadicWeight(rng, 8));
      any_final = true;
    }
    const int arcs = std::uniform_int_distribution<int>(0, opt.max_arcs_per_state)(rng);
    for (int k = 0; k < arcs; ++k) {
      int lo = opt.acyclic ? s + 1 : 0;
      if (lo >= n) break;
      StateId next = std::uniform_int_distribution<int>(lo, n - 1)(rng);
      Label il, ol;
      if (!opt.extra_labels.empty() && unit(rng) < opt.extra_prob) {
        il = ol = opt.extra_labels[std::uniform_int_distribution<size_t>(
            0, opt.extra_labels.size() - 1)(rng)];
      } else {
        il = unit(rng) < opt.eps_in ? kEpsilon
                                    : std::uniform_int_distribution<Label>(1, opt.max_ilabel)(rng);
        if (opt.acceptor)
          ol = il;
        else
          ol = unit(rng) < opt.eps_out
                   ? kEpsilon
                   : std::uniform_int_distribution<Label>(1, opt.max_olabel)(rng);
      }
      b.AddArc(s, {il, ol, DyadicWeight(rng), next});
    }
  }
  return std::move(b).Build();
}

inline void AddPath(PathMap *paths, const StringPair &key, double w) {
  auto [it, inserted] = paths->emplace(key, w);
  if (!inserted && w < it->second) it->second = w;
}

// All accepted (input, output) string pairs with their best weight, over
// paths of at most `max_arcs` arcs. Epsilons are dropped from strings.
inline PathMap EnumeratePaths(const Fst &fst, size_t max_arcs = 64) {
  PathMap paths;
  if (fst.Start() == kNoStateId) return paths;
  struct Frame {
    StateId s;
    LabelString in, out;
    double w;
    size_t depth;
  };
  std::vector<Frame> stack{{fst.Start(), {}, {}, 0.0, 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (fst.IsFinal(f.s)) AddPath(&paths, {f.in, f.out}, f.w + fst.Final(f.s).Value());
    if (f.depth == max_arcs) continue;
    for (const Arc &a : fst.Arcs(f.s)) {
      Frame g{a.nextstate, f.in, f.out, f.w + a.weight.Value(), f.depth + 1};
      if (a.ilabel != kEpsilon) g.in.push_back(a.ilabel);
      if (a.olabel != kEpsilon) g.out.push_back(a.olabel);
      stack.push_back(std::move(g));
    }
  }
  return paths;
}

// Output-side language of an acceptor-like path map (input strings are
// ignored, best weight kept).
inline std::map<LabelString, double> OutputLanguage(const PathMap &paths) {
  std::map<LabelString, double> out;
  for (const auto &[key, w] : paths) {
    auto [it, inserted] = out.emplace(key.second, w);
    if (!inserted && w < it->second) it->second = w;
  }
  return out;
}

// Textual substitution of class labels in the root language by the
// languages of their bound FSTs.
inline std::map<LabelString, double> SubstituteClasses(
    const std::map<LabelString, double> &root_lang, const std::set<Label> &classes,
    const std::map<Label, std::map<LabelString, double>> &class_langs) {
  std::map<LabelString, double> out;
  for (const auto &[str, w] : root_lang) {
    std::map<LabelString, double> partial{{{}, w}};
    for (Label l : str) {
      std::map<LabelString, double> next;
      if (!classes.count(l)) {
        for (const auto &[p, pw] : partial) {
          LabelString q = p;
          q.push_back(l);
          auto [it, ins] = next.emplace(q, pw);
          if (!ins && pw < it->second) it->second = pw;
        }
      } else {
        auto found = class_langs.find(l);
        if (found != class_langs.end())
          for (const auto &[p, pw] : partial)
            for (const auto &[c, cw] : found->second) {
              LabelString q = p;
              q.insert(q.end(), c.begin(), c.end());
              auto [it, ins] = next.emplace(q, pw + cw);
              if (!ins && pw + cw < it->second) it->second = pw + cw;
            }
      }
      partial = std::move(next);
    }
    for (const auto &[p, pw] : partial) {
      auto [it, ins] = out.emplace(p, pw);
      if (!ins && pw < it->second) it->second = pw;
    }
  }
  return out;
}

// Relational composition of a transducer path map with an acceptor
// language over the middle alphabet.
inline PathMap ComposeRelations(const PathMap &t1, const std::map<LabelString, double> &lang) {
  PathMap out;
  for (const auto &[key, w] : t1) {
    auto it = lang.find(key.second);
    if (it != lang.end()) AddPath(&out, key, w + it->second);
  }
  return out;
}

inline std::optional<double> BestWeight(const PathMap &paths) {
  std::optional<double> best;
  for (const auto &[key, w] : paths)
    if (!best || w < *best) best = w;
  return best;
}

// A random (T1, root, class FST) triple over a small alphabet: phones
// 1..3, words 1..4 and class label 5.
constexpr Label kTripleClass = 5;

struct RandomTriple {
  std::shared_ptr<const Fst> t1;
  std::shared_ptr<const Fst> root;
  std::shared_ptr<const Fst> class_fst;
  ClassLabelSet classes;
};

inline RandomTriple MakeRandomTriple(std::mt19937_64 &rng, bool acyclic) {
  RandomTriple t;
  RandomFstOptions o1;
  o1.max_ilabel = 3;
  o1.max_olabel = 4;
  o1.acyclic = acyclic;
  t.t1 = std::make_shared<const Fst>(RandomFst(rng, o1));
  RandomFstOptions o2;
  o2.acceptor = true;
  o2.max_ilabel = 4;
  o2.acyclic = acyclic;
  o2.extra_labels = {kTripleClass};
  o2.extra_prob = 0.3;
  t.root = std::make_shared<const Fst>(RandomFst(rng, o2));
  RandomFstOptions o3;
  o3.acceptor = true;
  o3.max_ilabel = 4;
  o3.eps_in = 0.0;
  o3.acyclic = acyclic;
  t.class_fst = std::make_shared<const Fst>(RandomFst(rng, o3));
  t.classes.Add(kTripleClass);
  return t;
}

// Explores every state reachable through `session` and returns the result
// as a concrete FST together with the key of each state.
struct ExploredGraph {
  Fst fst = MakeEmptyFst();
  std::vector<ComposedStateKey> keys;
};

inline ExploredGraph ExploreSession(Session *session, size_t max_states = 200000) {
  std::map<StateId, StateId> local;
  std::vector<StateId> order;
  FstBuilder b;
  auto visit = [&](StateId id) {
    auto [it, inserted] = local.emplace(id, static_cast<StateId>(order.size()));
    if (inserted) {
      order.push_back(id);
      b.AddState();
    }
    return it->second;
  };
  b.SetStart(visit(session->Start()));
  for (size_t i = 0; i < order.size() && i < max_states; ++i) {
    const Expansion &e = session->Expand(order[i]);
    std::vector<CachedArc> arcs = e.arcs;
    const Weight final = e.final;
    for (const CachedArc &a : arcs)
      b.AddArc(static_cast<StateId>(i), {a.ilabel, a.olabel, a.weight, visit(a.nextstate)});
    b.SetFinal(static_cast<StateId>(i), final);
  }
  ExploredGraph g;
  for (StateId id : order) g.keys.push_back(session->Key(id));
  g.fst = std::move(b).Build();
  return g;
}

// True iff the two graphs are identical under the bijection induced by
// their state keys: same key set, same final weights and the same
// multiset of arcs at every key.
template <class K>
bool SameUnderKeys(const Fst &a, const std::vector<K> &keys_a, const Fst &b,
                   const std::vector<K> &keys_b, std::string *why = nullptr) {
  auto fail = [&](const std::string &m) {
    if (why) *why = m;
    return false;
  };
  if (a.NumStates() != b.NumStates() || keys_a.size() != keys_b.size())
    return fail("state counts differ: " + std::to_string(a.NumStates()) + " vs " +
                std::to_string(b.NumStates()));
  std::map<K, StateId> index_b;
  for (size_t i = 0; i < keys_b.size(); ++i) index_b[keys_b[i]] = static_cast<StateId>(i);
  if (index_b.size() != keys_b.size()) return fail("duplicate keys");
  if (keys_a[a.Start()] != keys_b[b.Start()]) return fail("start keys differ");
  typedef std::tuple<Label, Label, double, K> KeyedArc;
  for (StateId s = 0; s < a.NumStates(); ++s) {
    auto it = index_b.find(keys_a[s]);
    if (it == index_b.end()) return fail("key missing on one side");
    const StateId t = it->second;
    if (a.Final(s) != b.Final(t)) return fail("final weights differ");
    std::multiset<KeyedArc> arcs_a, arcs_b;
    for (const Arc &x : a.Arcs(s))
      arcs_a.insert({x.ilabel, x.olabel, x.weight.Value(), keys_a[x.nextstate]});
    for (const Arc &x : b.Arcs(t))
      arcs_b.insert({x.ilabel, x.olabel, x.weight.Value(), keys_b[x.nextstate]});
    if (arcs_a != arcs_b) return fail("arcs differ at state " + std::to_string(s));
  }
  return true;
}

// Exhaustive time-synchronous search over a concrete decoding graph:
// Dijkstra over (frame, state) nodes. Emitting arcs advance one frame and
// add the acoustic cost; epsilon-input arcs stay within the frame. Costs
// are accumulated in the same order as the decoder so results are
// bit-identical.
struct TrellisResult {
  bool found = false;
  double cost = std::numeric_limits<double>::infinity();
  LabelString words;
};

inline TrellisResult TrellisSearch(const Fst &graph, const ScoreMatrix &scores) {
  const int frames = scores.NumFrames();
  const StateId n = graph.NumStates();
  TrellisResult result;
  if (graph.Start() == kNoStateId) return result;
  auto node = [n](int t, StateId s) { return static_cast<size_t>(t) * n + s; };
  const size_t num_nodes = static_cast<size_t>(frames + 1) * n;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(num_nodes, inf);
  std::vector<std::pair<size_t, Label>> back(num_nodes, {SIZE_MAX, kEpsilon});
  typedef std::pair<double, size_t> Entry;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  dist[node(0, graph.Start())] = 0.0;
  queue.push({0.0, node(0, graph.Start())});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d != dist[u]) continue;
    const int t = static_cast<int>(u / n);
    const StateId s = static_cast<StateId>(u % n);
    for (const Arc &a : graph.Arcs(s)) {
      size_t v;
      double c;
      if (a.ilabel == kEpsilon) {
        v = node(t, a.nextstate);
        c = d + a.weight.Value();
      } else {
        if (t == frames) continue;
        v = node(t + 1, a.nextstate);
        c = d + (a.weight.Value() + scores.Cost(t, a.ilabel));
      }
      if (c < dist[v]) {
        dist[v] = c;
        back[v] = {u, a.olabel};
        queue.push({c, v});
      }
    }
  }
  size_t best = SIZE_MAX;
  for (StateId s = 0; s < n; ++s) {
    if (!graph.IsFinal(s)) continue;
    const double total = dist[node(frames, s)] + graph.Final(s).Value();
    if (total < result.cost) {
      result.cost = total;
      best = node(frames, s);
    }
  }
  if (best == SIZE_MAX || std::isinf(result.cost)) return result;
  result.found = true;
  for (size_t v = best; back[v].first != SIZE_MAX; v = back[v].first)
    if (back[v].second != kEpsilon) result.words.push_back(back[v].second);
  std::reverse(result.words.begin(), result.words.end());
  return result;
}

// A sealed public cache that holds nothing beyond the start key.
inline std::shared_ptr<const PublicCache> EmptyPublicCache(
    std::shared_ptr<const RecognitionGraph> graph) {
  auto cache = std::make_shared<PublicCache>(graph);
  cache->Seal();
  return cache;
}

}  // namespace testing
}  // namespace pcfst

#endif  // PCFST_TESTS_TEST_UTIL_H_
