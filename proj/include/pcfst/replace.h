// pcfst/replace.h

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

#ifndef PCFST_REPLACE_H_
#define PCFST_REPLACE_H_

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "pcfst/compose.h"
#include "pcfst/fst.h"
#include "pcfst/symbol-table.h"

namespace pcfst {

// A state of the replaced LM view. ROOT(q) is a root state with
// cls == kEpsilon and inner == 0 (the (q_c, 0) pair of the class-LM
// literature). INSIDE(p, q_p, r) sits at q_p of the FST bound to class p
// and returns to root state r on exit. Nesting depth is at most one.
struct ReplaceState {
  StateId root = 0;  // q_c, or the return state when inside
  Label cls = kEpsilon;
  StateId inner = 0;

  static ReplaceState Root(StateId q) { return {q, kEpsilon, 0}; }
  static ReplaceState Inside(Label cls, StateId q_p, StateId ret) {
    return {ret, cls, q_p};
  }
  bool IsRoot() const { return cls == kEpsilon; }

  friend auto operator<=>(const ReplaceState &, const ReplaceState &) = default;
  friend bool operator==(const ReplaceState &, const ReplaceState &) = default;
};

}  // namespace pcfst

template <>
struct std::hash<pcfst::ReplaceState> {
  size_t operator()(const pcfst::ReplaceState &s) const {
    size_t h = std::hash<int32_t>()(s.root);
    h = pcfst::HashCombine(h, std::hash<int32_t>()(s.cls));
    return pcfst::HashCombine(h, std::hash<int32_t>()(s.inner));
  }
};

namespace pcfst {

// Class label -> bound class FST (a user's G_p).
class ClassBinding {
 public:
  ClassBinding() = default;

  void Bind(Label cls, std::shared_ptr<const Fst> fst);
  const Fst *Find(Label cls) const;
  const std::map<Label, std::shared_ptr<const Fst>> &Bindings() const { return map_; }

  // Binds every label of `classes` to the same FST.
  static ClassBinding Uniform(const ClassLabelSet &classes,
                              std::shared_ptr<const Fst> fst);

 private:
  std::map<Label, std::shared_ptr<const Fst>> map_;
};

// Lazy Replace(root, binding). A class-label arc q -p/w-> r of the root
// becomes an epsilon arc of weight w into INSIDE(p, start(G_p), r); final
// states of G_p get an epsilon arc weighted by their final weight back to
// ROOT(r). Holds references: root, classes and binding must outlive it.
class ReplaceView {
 public:
  typedef ReplaceState State;

  // Throws DataError if a bound FST emits a class label (nesting > 1).
  ReplaceView(const Fst &root, const ClassLabelSet &classes,
              const ClassBinding &binding);

  State Start() const { return ReplaceState::Root(root_.Start()); }
  Weight Final(State s) const;
  // Throws ExpansionError naming the label when a class is unbound.
  void AppendArcs(State s, std::vector<ViewArc<State>> *arcs) const;
  const std::shared_ptr<const SymbolTable> &OutputSymbols() const {
    return root_.OutputSymbols();
  }

  const Fst &root() const { return root_; }
  const ClassLabelSet &classes() const { return classes_; }

 private:
  const Fst &root_;
  const ClassLabelSet &classes_;
  const ClassBinding &binding_;
};

// True iff some out-arc of root state q carries a class output label.
bool HasClassArc(const Fst &root, const ClassLabelSet &classes, StateId q);

// Isolates every class-label arc (src -p/w-> dst) behind an epsilon:
// src -eps/w-> new -p/0-> dst, one new state per distinct (src, p, dst).
// Afterwards no original state (in particular the start) has a class
// out-arc, and each new state has exactly one out-arc, the class arc.
// Language and path weights are unchanged.
Fst InsertEpsilonBeforeClass(const Fst &root, const ClassLabelSet &classes);

// Two-state acceptor for the single word "<temp>" with weight One.
// `temp` is the label of "<temp>".
Fst MakePlaceholderClassFst(Label temp,
                            std::shared_ptr<const SymbolTable> syms = nullptr);

}  // namespace pcfst

#endif  // PCFST_REPLACE_H_
