// pcfst/determinize.cc

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

#include "pcfst/determinize.h"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "pcfst/errors.h"

namespace pcfst {

bool IsAcyclic(const Fst &fst) {
  enum Color : char { kWhite, kGrey, kBlack };
  std::vector<Color> color(fst.NumStates(), kWhite);
  std::vector<std::pair<StateId, size_t>> stack;
  for (StateId root = 0; root < fst.NumStates(); ++root) {
    if (color[root] != kWhite) continue;
    stack.push_back({root, 0});
    color[root] = kGrey;
    while (!stack.empty()) {
      auto &[s, i] = stack.back();
      if (i == fst.NumArcs(s)) {
        color[s] = kBlack;
        stack.pop_back();
        continue;
      }
      StateId next = fst.Arcs(s)[i++].nextstate;
      if (color[next] == kGrey) return false;
      if (color[next] == kWhite) {
        color[next] = kGrey;
        stack.push_back({next, 0});
      }
    }
  }
  return true;
}

bool IsAcceptor(const Fst &fst) {
  for (StateId s = 0; s < fst.NumStates(); ++s)
    for (const Arc &a : fst.Arcs(s))
      if (a.ilabel != a.olabel) return false;
  return true;
}

bool IsInputDeterministic(const Fst &fst) {
  for (StateId s = 0; s < fst.NumStates(); ++s) {
    auto arcs = fst.Arcs(s);  // sorted by ilabel
    for (size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].ilabel == kEpsilon) return false;
      if (i > 0 && arcs[i].ilabel == arcs[i - 1].ilabel) return false;
    }
  }
  return true;
}

Fst DeterminizeAcyclic(const Fst &fst) {
  if (!IsAcceptor(fst)) throw DataError("determinize: input is not an acceptor");
  if (!IsAcyclic(fst)) throw DataError("determinize: input is cyclic");
  for (StateId s = 0; s < fst.NumStates(); ++s)
    for (const Arc &a : fst.Arcs(s))
      if (a.ilabel == kEpsilon) throw DataError("determinize: input has epsilon arcs");

  // A subset is a state-sorted list of (state, residual weight).
  typedef std::vector<std::pair<StateId, double>> Subset;
  std::map<Subset, StateId> ids;
  std::vector<Subset> subsets;
  FstBuilder out;
  out.SetInputSymbols(fst.InputSymbols());
  out.SetOutputSymbols(fst.OutputSymbols());

  auto intern = [&](Subset subset) {
    auto [it, inserted] = ids.emplace(subset, static_cast<StateId>(subsets.size()));
    if (inserted) {
      subsets.push_back(std::move(subset));
      out.AddState();
    }
    return it->second;
  };
  out.SetStart(intern({{fst.Start(), 0.0}}));

  for (StateId d = 0; d < static_cast<StateId>(subsets.size()); ++d) {
    const Subset subset = subsets[d];
    Weight final = Weight::Zero();
    std::map<Label, std::map<StateId, double>> by_label;
    for (const auto &[q, residual] : subset) {
      if (fst.IsFinal(q)) final = Plus(final, Times(Weight(residual), fst.Final(q)));
      for (const Arc &a : fst.Arcs(q)) {
        double w = residual + a.weight.Value();
        auto [it, inserted] = by_label[a.ilabel].emplace(a.nextstate, w);
        if (!inserted) it->second = std::min(it->second, w);
      }
    }
    out.SetFinal(d, final);
    for (const auto &[label, dests] : by_label) {
      double best = dests.begin()->second;
      for (const auto &[q, w] : dests) best = std::min(best, w);
      Subset next;
      next.reserve(dests.size());
      for (const auto &[q, w] : dests) next.emplace_back(q, w == best ? 0.0 : w - best);
      StateId n = intern(std::move(next));
      out.AddArc(d, {label, label, Weight(best), n});
    }
  }
  return std::move(out).Build();
}

Fst MinimizeAcyclic(const Fst &fst) {
  if (!IsAcyclic(fst)) throw DataError("minimize: input is cyclic");
  if (!IsInputDeterministic(fst)) throw DataError("minimize: input is not deterministic");

  // Post-order over states reachable from the start: successors first.
  std::vector<StateId> order;
  std::vector<char> seen(fst.NumStates(), 0);
  std::vector<std::pair<StateId, size_t>> stack{{fst.Start(), 0}};
  seen[fst.Start()] = 1;
  while (!stack.empty()) {
    auto &[s, i] = stack.back();
    if (i == fst.NumArcs(s)) {
      order.push_back(s);
      stack.pop_back();
      continue;
    }
    StateId next = fst.Arcs(s)[i++].nextstate;
    if (!seen[next]) {
      seen[next] = 1;
      stack.push_back({next, 0});
    }
  }

  typedef std::tuple<Label, Label, double, StateId> SigArc;
  typedef std::pair<double, std::vector<SigArc>> Signature;
  std::map<Signature, StateId> classes;
  std::vector<StateId> cls(fst.NumStates(), kNoStateId);
  std::vector<StateId> representative;
  for (StateId s : order) {
    Signature sig;
    sig.first = fst.Final(s).Value();
    for (const Arc &a : fst.Arcs(s))
      sig.second.emplace_back(a.ilabel, a.olabel, a.weight.Value(), cls[a.nextstate]);
    auto [it, inserted] = classes.emplace(std::move(sig), static_cast<StateId>(representative.size()));
    if (inserted) representative.push_back(s);
    cls[s] = it->second;
  }

  // Renumber classes breadth-first from the start class.
  std::vector<StateId> number(representative.size(), kNoStateId);
  std::deque<StateId> queue{cls[fst.Start()]};
  FstBuilder out;
  out.SetInputSymbols(fst.InputSymbols());
  out.SetOutputSymbols(fst.OutputSymbols());
  number[cls[fst.Start()]] = out.AddState();
  out.SetStart(0);
  while (!queue.empty()) {
    StateId c = queue.front();
    queue.pop_front();
    StateId rep = representative[c];
    out.SetFinal(number[c], fst.Final(rep));
    for (const Arc &a : fst.Arcs(rep)) {
      StateId nc = cls[a.nextstate];
      if (number[nc] == kNoStateId) {
        number[nc] = out.AddState();
        queue.push_back(nc);
      }
      out.AddArc(number[c], {a.ilabel, a.olabel, a.weight, number[nc]});
    }
  }
  return std::move(out).Build();
}

Fst ReplaceLabelsWithEpsilon(const Fst &fst, const std::function<bool(Label)> &pred) {
  FstBuilder out = FstBuilder::From(fst);
  for (StateId s = 0; s < out.NumStates(); ++s) {
    std::vector<Arc> &arcs = out.MutableArcs(s);
    for (Arc &a : arcs) {
      if (pred(a.ilabel)) a.ilabel = kEpsilon;
      if (pred(a.olabel)) a.olabel = kEpsilon;
    }
    std::sort(arcs.begin(), arcs.end(), ArcLess);
    arcs.erase(std::unique(arcs.begin(), arcs.end(),
                           [](const Arc &a, const Arc &b) {
                             return a.ilabel == b.ilabel && a.olabel == b.olabel &&
                                    a.nextstate == b.nextstate;
                           }),
               arcs.end());
  }
  return std::move(out).Build();
}

}  // namespace pcfst
