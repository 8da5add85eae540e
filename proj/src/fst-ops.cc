// pcfst/fst-ops.cc

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

#include "pcfst/fst-ops.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <tuple>

namespace pcfst {

Fst Connect(const Fst &fst) {
  const StateId n = fst.NumStates();
  std::vector<bool> access(n, false), coaccess(n, false);

  std::vector<StateId> stack{fst.Start()};
  access[fst.Start()] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const Arc &arc : fst.Arcs(s)) {
      if (!access[arc.nextstate]) {
        access[arc.nextstate] = true;
        stack.push_back(arc.nextstate);
      }
    }
  }

  std::vector<std::vector<StateId>> preds(n);
  for (StateId s = 0; s < n; ++s)
    for (const Arc &arc : fst.Arcs(s)) preds[arc.nextstate].push_back(s);
  for (StateId s = 0; s < n; ++s) {
    if (fst.IsFinal(s)) {
      coaccess[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s]) {
      if (!coaccess[p]) {
        coaccess[p] = true;
        stack.push_back(p);
      }
    }
  }

  if (!coaccess[fst.Start()])
    return MakeEmptyFst(fst.InputSymbols(), fst.OutputSymbols());

  std::vector<StateId> remap(n, kNoStateId);
  FstBuilder b;
  for (StateId s = 0; s < n; ++s)
    if (access[s] && coaccess[s]) remap[s] = b.AddState();
  for (StateId s = 0; s < n; ++s) {
    if (remap[s] == kNoStateId) continue;
    if (fst.IsFinal(s)) b.SetFinal(remap[s], fst.Final(s));
    for (const Arc &arc : fst.Arcs(s)) {
      if (remap[arc.nextstate] == kNoStateId) continue;
      b.AddArc(remap[s], Arc{arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate]});
    }
  }
  b.SetStart(remap[fst.Start()]);
  b.SetInputSymbols(fst.InputSymbols());
  b.SetOutputSymbols(fst.OutputSymbols());
  return std::move(b).Build();
}

std::optional<ShortestPathResult> ShortestPath(const Fst &fst) {
  const StateId n = fst.NumStates();
  std::vector<Weight> dist(n, Weight::Zero());
  std::vector<int> hops(n, 0);
  std::vector<StateId> pred(n, kNoStateId);
  std::vector<int> pred_arc(n, -1);
  std::vector<bool> done(n, false);

  typedef std::tuple<double, int, StateId> Entry;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  dist[fst.Start()] = Weight::One();
  queue.emplace(0.0, 0, fst.Start());

  while (!queue.empty()) {
    auto [d, h, s] = queue.top();
    queue.pop();
    if (done[s] || d != dist[s].Value() || h != hops[s]) continue;
    done[s] = true;
    int idx = 0;
    for (const Arc &arc : fst.Arcs(s)) {
      const StateId t = arc.nextstate;
      const Weight cand = Times(dist[s], arc.weight);
      const int cand_hops = hops[s] + 1;
      if (!done[t]) {
        bool better = cand < dist[t] ||
                      (cand == dist[t] &&
                       (cand_hops < hops[t] ||
                        (cand_hops == hops[t] &&
                         std::tie(s, idx) < std::tie(pred[t], pred_arc[t]))));
        if (better) {
          dist[t] = cand;
          hops[t] = cand_hops;
          pred[t] = s;
          pred_arc[t] = idx;
          queue.emplace(cand.Value(), cand_hops, t);
        }
      }
      ++idx;
    }
  }

  StateId best = kNoStateId;
  Weight best_weight = Weight::Zero();
  for (StateId s = 0; s < n; ++s) {
    if (!fst.IsFinal(s) || dist[s].IsZero()) continue;
    Weight total = Times(dist[s], fst.Final(s));
    if (best == kNoStateId || total < best_weight ||
        (total == best_weight && hops[s] < hops[best])) {
      best = s;
      best_weight = total;
    }
  }
  if (best == kNoStateId) return std::nullopt;

  ShortestPathResult result;
  result.weight = best_weight;
  std::vector<const Arc *> path;
  for (StateId s = best; pred[s] != kNoStateId; s = pred[s])
    path.push_back(&fst.Arcs(pred[s])[pred_arc[s]]);
  std::reverse(path.begin(), path.end());
  result.states.push_back(fst.Start());
  for (const Arc *arc : path) {
    if (arc->ilabel != kEpsilon) result.ilabels.push_back(arc->ilabel);
    if (arc->olabel != kEpsilon) result.olabels.push_back(arc->olabel);
    result.states.push_back(arc->nextstate);
  }
  return result;
}

Fst Canonicalize(const Fst &fst) {
  const StateId n = fst.NumStates();
  std::vector<StateId> order;
  std::vector<StateId> remap(n, kNoStateId);
  std::queue<StateId> queue;
  remap[fst.Start()] = 0;
  order.push_back(fst.Start());
  queue.push(fst.Start());
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop();
    std::vector<Arc> arcs(fst.Arcs(s).begin(), fst.Arcs(s).end());
    std::stable_sort(arcs.begin(), arcs.end(), [](const Arc &a, const Arc &b) {
      return std::make_tuple(a.ilabel, a.olabel, a.weight.Value()) <
             std::make_tuple(b.ilabel, b.olabel, b.weight.Value());
    });
    for (const Arc &arc : arcs) {
      if (remap[arc.nextstate] != kNoStateId) continue;
      remap[arc.nextstate] = static_cast<StateId>(order.size());
      order.push_back(arc.nextstate);
      queue.push(arc.nextstate);
    }
  }
  for (StateId s = 0; s < n; ++s) {
    if (remap[s] == kNoStateId) {
      remap[s] = static_cast<StateId>(order.size());
      order.push_back(s);
    }
  }
  FstBuilder b;
  for (StateId i = 0; i < n; ++i) b.AddState();
  for (StateId s = 0; s < n; ++s) {
    if (fst.IsFinal(s)) b.SetFinal(remap[s], fst.Final(s));
    for (const Arc &arc : fst.Arcs(s))
      b.AddArc(remap[s], Arc{arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate]});
  }
  b.SetStart(0);
  b.SetInputSymbols(fst.InputSymbols());
  b.SetOutputSymbols(fst.OutputSymbols());
  return std::move(b).Build();
}

}  // namespace pcfst
