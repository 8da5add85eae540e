// pcfst/compose.h

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

// Pairwise composition T1 o T2 with the epsilon-sequencing filter.
//
// T1 is always a concrete Fst. T2 is any "view" type providing
//
//   typedef ... State;                       // totally ordered, hashable
//   State Start() const;
//   Weight Final(State s) const;
//   void AppendArcs(State s, std::vector<ViewArc<State>> *arcs) const;
//   const std::shared_ptr<const SymbolTable> &OutputSymbols() const;
//
// where AppendArcs appends the arcs of `s` ordered by input label. Plain
// Fsts are adapted by StaticView; the class-LM replacement is ReplaceView
// (replace.h). Both go through the same code path.
//
// Two implementations live here: ExpandPairState(), the single-state lazy
// kernel used by the cache (sort-merge matching), and ComposeStatic(), a
// separately written full composition (exhaustive arc-pair scan) that
// serves as the reference the lazy structures are checked against.

#ifndef PCFST_COMPOSE_H_
#define PCFST_COMPOSE_H_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "pcfst/errors.h"
#include "pcfst/fst.h"

namespace pcfst {

enum class FilterState : uint8_t {
  kAny = 0,       // no epsilon move pending
  kEps1Only = 1,  // last move advanced T1 alone on an output epsilon
  kEps2Only = 2,  // last move advanced T2 alone on an input epsilon
  kBlocked = 3,   // move disallowed; never materialized as a state
};

enum class MoveType : uint8_t {
  kMatch,   // T1 olabel == T2 ilabel != eps
  kEps1,    // T1 arc with olabel eps, T2 stays
  kEps2,    // T2 arc with ilabel eps, T1 stays
  kEpsEps,  // both advance on epsilon together
};

// Filter transition table. Between two matching moves it admits exactly one
// interleaving of the pending epsilon moves: simultaneous moves first, then
// the remainder on one side only.
constexpr FilterState FilterTransition(FilterState f, MoveType m) {
  switch (m) {
    case MoveType::kMatch:
      return f == FilterState::kBlocked ? FilterState::kBlocked : FilterState::kAny;
    case MoveType::kEpsEps:
      return f == FilterState::kAny ? FilterState::kAny : FilterState::kBlocked;
    case MoveType::kEps1:
      return (f == FilterState::kAny || f == FilterState::kEps1Only)
                 ? FilterState::kEps1Only
                 : FilterState::kBlocked;
    case MoveType::kEps2:
      return (f == FilterState::kAny || f == FilterState::kEps2Only)
                 ? FilterState::kEps2Only
                 : FilterState::kBlocked;
  }
  return FilterState::kBlocked;
}

template <class S>
struct ViewArc {
  Label ilabel;
  Label olabel;
  Weight weight;
  S next;
};

// Adapts a concrete Fst to the view interface.
class StaticView {
 public:
  typedef StateId State;

  explicit StaticView(const Fst &fst) : fst_(fst) {}

  State Start() const { return fst_.Start(); }
  Weight Final(State s) const { return fst_.Final(s); }
  void AppendArcs(State s, std::vector<ViewArc<State>> *arcs) const {
    for (const Arc &arc : fst_.Arcs(s))
      arcs->push_back({arc.ilabel, arc.olabel, arc.weight, arc.nextstate});
  }
  const std::shared_ptr<const SymbolTable> &OutputSymbols() const {
    return fst_.OutputSymbols();
  }

 private:
  const Fst &fst_;
};

inline size_t HashCombine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 12) + (seed >> 4));
}

template <class S>
struct PairState {
  StateId q1 = kNoStateId;
  S q2{};
  FilterState filter = FilterState::kAny;

  friend auto operator<=>(const PairState &, const PairState &) = default;
  friend bool operator==(const PairState &, const PairState &) = default;
};

template <class S>
struct PairStateHash {
  size_t operator()(const PairState<S> &p) const {
    size_t h = std::hash<StateId>()(p.q1);
    h = HashCombine(h, std::hash<S>()(p.q2));
    return HashCombine(h, static_cast<size_t>(p.filter));
  }
};

template <class S>
struct PairArc {
  Label ilabel;
  Label olabel;
  Weight weight;
  PairState<S> next;

  friend bool operator==(const PairArc &a, const PairArc &b) {
    return a.ilabel == b.ilabel && a.olabel == b.olabel && a.weight == b.weight &&
           a.next == b.next;
  }
};

// Canonical order of a pair state's out-arcs.
template <class S>
bool PairArcLess(const PairArc<S> &a, const PairArc<S> &b) {
  if (a.ilabel != b.ilabel) return a.ilabel < b.ilabel;
  if (a.olabel != b.olabel) return a.olabel < b.olabel;
  if (a.next != b.next) return a.next < b.next;
  return a.weight.Value() < b.weight.Value();
}

template <class S>
struct PairExpansion {
  std::vector<PairArc<S>> arcs;  // sorted by PairArcLess
  Weight final = Weight::Zero();
};

template <class View>
PairState<typename View::State> ComposeStart(const Fst &t1, const View &t2) {
  return {t1.Start(), t2.Start(), FilterState::kAny};
}

// Computes the out-arcs and final weight of one composed state. Pure in
// (s, t1, t2).
template <class View>
PairExpansion<typename View::State> ExpandPairState(
    const PairState<typename View::State> &s, const Fst &t1, const View &t2) {
  typedef typename View::State S;
  PairExpansion<S> out;
  if (s.filter == FilterState::kBlocked) return out;

  std::span<const Arc> arcs1 = t1.Arcs(s.q1);
  std::vector<uint32_t> order1(arcs1.size());
  std::iota(order1.begin(), order1.end(), 0);
  std::stable_sort(order1.begin(), order1.end(), [&](uint32_t a, uint32_t b) {
    return arcs1[a].olabel < arcs1[b].olabel;
  });
  std::vector<ViewArc<S>> arcs2;
  t2.AppendArcs(s.q2, &arcs2);

  size_t eps1_end = 0, eps2_end = 0;
  while (eps1_end < order1.size() && arcs1[order1[eps1_end]].olabel == kEpsilon) ++eps1_end;
  while (eps2_end < arcs2.size() && arcs2[eps2_end].ilabel == kEpsilon) ++eps2_end;

  // A one-sided move is dropped when the side that stays put has only
  // epsilon arcs and is not final: the filter would then admit no further
  // progress from the target.
  const bool all_eps1 = eps1_end == order1.size() && t1.Final(s.q1).IsZero();
  const bool all_eps2 = eps2_end == arcs2.size() && t2.Final(s.q2).IsZero();
  const FilterState f_eps1 =
      all_eps2 ? FilterState::kBlocked : FilterTransition(s.filter, MoveType::kEps1);
  const FilterState f_eps2 =
      all_eps1 ? FilterState::kBlocked : FilterTransition(s.filter, MoveType::kEps2);
  const FilterState f_epseps = FilterTransition(s.filter, MoveType::kEpsEps);
  const FilterState f_match = FilterTransition(s.filter, MoveType::kMatch);

  for (size_t i = 0; i < eps1_end; ++i) {
    const Arc &a1 = arcs1[order1[i]];
    if (f_eps1 != FilterState::kBlocked)
      out.arcs.push_back({a1.ilabel, kEpsilon, a1.weight, {a1.nextstate, s.q2, f_eps1}});
    if (f_epseps != FilterState::kBlocked) {
      for (size_t j = 0; j < eps2_end; ++j) {
        const ViewArc<S> &a2 = arcs2[j];
        out.arcs.push_back({a1.ilabel, a2.olabel, Times(a1.weight, a2.weight),
                            {a1.nextstate, a2.next, f_epseps}});
      }
    }
  }
  if (f_eps2 != FilterState::kBlocked) {
    for (size_t j = 0; j < eps2_end; ++j) {
      const ViewArc<S> &a2 = arcs2[j];
      out.arcs.push_back({kEpsilon, a2.olabel, a2.weight, {s.q1, a2.next, f_eps2}});
    }
  }

  // Sort-merge on T1 olabel vs T2 ilabel.
  size_t i = eps1_end, j = eps2_end;
  while (i < order1.size() && j < arcs2.size()) {
    const Label l1 = arcs1[order1[i]].olabel;
    const Label l2 = arcs2[j].ilabel;
    if (l1 < l2) {
      ++i;
    } else if (l2 < l1) {
      ++j;
    } else {
      size_t i_end = i, j_end = j;
      while (i_end < order1.size() && arcs1[order1[i_end]].olabel == l1) ++i_end;
      while (j_end < arcs2.size() && arcs2[j_end].ilabel == l1) ++j_end;
      for (size_t a = i; a < i_end; ++a) {
        const Arc &a1 = arcs1[order1[a]];
        for (size_t b = j; b < j_end; ++b) {
          const ViewArc<S> &a2 = arcs2[b];
          out.arcs.push_back({a1.ilabel, a2.olabel, Times(a1.weight, a2.weight),
                              {a1.nextstate, a2.next, f_match}});
        }
      }
      i = i_end;
      j = j_end;
    }
  }
  std::sort(out.arcs.begin(), out.arcs.end(), PairArcLess<S>);

  const Weight f1 = t1.Final(s.q1);
  const Weight f2 = t2.Final(s.q2);
  if (!f1.IsZero() && !f2.IsZero()) out.final = Times(f1, f2);
  return out;
}

template <class S>
struct StaticComposition {
  Fst fst;
  std::vector<PairState<S>> states;  // composed state id -> pair state
};

// Full composition by breadth-first exploration from the start pair.
// Throws ResourceError once more than `max_states` states are created.
template <class View>
StaticComposition<typename View::State> ComposeStatic(const Fst &t1, const View &t2,
                                                      size_t max_states = 1000000) {
  typedef typename View::State S;
  std::map<PairState<S>, StateId> ids;
  std::vector<PairState<S>> states;
  std::queue<StateId> queue;
  FstBuilder b;

  auto intern = [&](const PairState<S> &p) {
    auto [it, inserted] = ids.emplace(p, static_cast<StateId>(states.size()));
    if (inserted) {
      if (states.size() >= max_states)
        throw ResourceError("composition exceeded " + std::to_string(max_states) +
                            " states");
      states.push_back(p);
      b.AddState();
      queue.push(it->second);
    }
    return it->second;
  };

  b.SetStart(intern({t1.Start(), t2.Start(), FilterState::kAny}));
  std::vector<ViewArc<S>> arcs2;
  while (!queue.empty()) {
    const StateId id = queue.front();
    queue.pop();
    const PairState<S> p = states[id];
    arcs2.clear();
    t2.AppendArcs(p.q2, &arcs2);
    const bool stuck1 = t1.Final(p.q1).IsZero() &&
                        std::all_of(t1.Arcs(p.q1).begin(), t1.Arcs(p.q1).end(),
                                    [](const Arc &a) { return a.olabel == kEpsilon; });
    const bool stuck2 = t2.Final(p.q2).IsZero() &&
                        std::all_of(arcs2.begin(), arcs2.end(),
                                    [](const ViewArc<S> &a) { return a.ilabel == kEpsilon; });

    for (const Arc &a1 : t1.Arcs(p.q1)) {
      if (a1.olabel == kEpsilon && !stuck2) {
        FilterState f = FilterTransition(p.filter, MoveType::kEps1);
        if (f != FilterState::kBlocked) {
          StateId d = intern({a1.nextstate, p.q2, f});
          b.AddArc(id, Arc{a1.ilabel, kEpsilon, a1.weight, d});
        }
      }
      for (const ViewArc<S> &a2 : arcs2) {
        MoveType m;
        if (a1.olabel == kEpsilon && a2.ilabel == kEpsilon)
          m = MoveType::kEpsEps;
        else if (a1.olabel != kEpsilon && a1.olabel == a2.ilabel)
          m = MoveType::kMatch;
        else
          continue;
        FilterState f = FilterTransition(p.filter, m);
        if (f == FilterState::kBlocked) continue;
        StateId d = intern({a1.nextstate, a2.next, f});
        b.AddArc(id, Arc{a1.ilabel, a2.olabel, Times(a1.weight, a2.weight), d});
      }
    }
    for (const ViewArc<S> &a2 : arcs2) {
      if (a2.ilabel != kEpsilon || stuck1) continue;
      FilterState f = FilterTransition(p.filter, MoveType::kEps2);
      if (f == FilterState::kBlocked) continue;
      StateId d = intern({p.q1, a2.next, f});
      b.AddArc(id, Arc{kEpsilon, a2.olabel, a2.weight, d});
    }
    const Weight f1 = t1.Final(p.q1), f2 = t2.Final(p.q2);
    if (!f1.IsZero() && !f2.IsZero()) b.SetFinal(id, Times(f1, f2));
  }
  b.SetInputSymbols(t1.InputSymbols());
  b.SetOutputSymbols(t2.OutputSymbols());
  return {std::move(b).Build(), std::move(states)};
}

}  // namespace pcfst

#endif  // PCFST_COMPOSE_H_
