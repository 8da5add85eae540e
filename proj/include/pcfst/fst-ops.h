// pcfst/fst-ops.h

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

#ifndef PCFST_FST_OPS_H_
#define PCFST_FST_OPS_H_

#include <optional>
#include <vector>

#include "pcfst/fst.h"

namespace pcfst {

// Keeps the states that are both accessible and coaccessible, preserving
// their relative order. If the start state is not coaccessible the result
// is the one-state empty FST.
Fst Connect(const Fst &fst);

struct ShortestPathResult {
  Weight weight;
  std::vector<Label> ilabels;   // epsilons removed
  std::vector<Label> olabels;   // epsilons removed
  std::vector<StateId> states;  // visited states, start first
};

// Single-source tropical shortest path (Dijkstra). Path costs are summed
// left to right along the path, so the reported weight is exactly the
// cost a left-to-right Viterbi pass computes. Ties on weight go to the
// path with fewer arcs, then to the smaller predecessor state, then to the
// earlier arc. Returns nullopt when no accepting path exists.
std::optional<ShortestPathResult> ShortestPath(const Fst &fst);

// Renumbers states in breadth-first discovery order from the start,
// following arcs in (ilabel, olabel, weight) order; unreachable states keep
// their relative order at the end. Label-deterministic FSTs that are
// isomorphic map to identical results.
Fst Canonicalize(const Fst &fst);

}  // namespace pcfst

#endif  // PCFST_FST_OPS_H_
