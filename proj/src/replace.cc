// pcfst/replace.cc

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

#include "pcfst/replace.h"

#include <algorithm>
#include <tuple>

#include "pcfst/errors.h"

namespace pcfst {

namespace {

std::string LabelName(const Fst &fst, Label l) {
  const auto &syms = fst.OutputSymbols();
  if (syms && syms->HasLabel(l)) return syms->Symbol(l);
  return std::to_string(l);
}

}  // namespace

void ClassBinding::Bind(Label cls, std::shared_ptr<const Fst> fst) {
  if (cls == kEpsilon) throw DataError("cannot bind epsilon as a class");
  if (!fst) throw DataError("null class FST");
  map_[cls] = std::move(fst);
}

const Fst *ClassBinding::Find(Label cls) const {
  auto it = map_.find(cls);
  return it == map_.end() ? nullptr : it->second.get();
}

ClassBinding ClassBinding::Uniform(const ClassLabelSet &classes,
                                   std::shared_ptr<const Fst> fst) {
  ClassBinding b;
  for (Label l : classes.Labels()) b.Bind(l, fst);
  return b;
}

ReplaceView::ReplaceView(const Fst &root, const ClassLabelSet &classes,
                         const ClassBinding &binding)
    : root_(root), classes_(classes), binding_(binding) {
  for (const auto &[cls, fst] : binding_.Bindings()) {
    for (StateId s = 0; s < fst->NumStates(); ++s) {
      for (const Arc &arc : fst->Arcs(s)) {
        if (classes_.Contains(arc.olabel) || classes_.Contains(arc.ilabel))
          throw DataError("class FST for '" + LabelName(root_, cls) +
                          "' contains class label '" + LabelName(root_, arc.olabel) +
                          "'; nested classes are not supported");
      }
    }
  }
}

Weight ReplaceView::Final(State s) const {
  return s.IsRoot() ? root_.Final(s.root) : Weight::Zero();
}

void ReplaceView::AppendArcs(State s, std::vector<ViewArc<State>> *arcs) const {
  const size_t begin = arcs->size();
  if (s.IsRoot()) {
    for (const Arc &arc : root_.Arcs(s.root)) {
      if (classes_.Contains(arc.olabel)) {
        const Fst *sub = binding_.Find(arc.olabel);
        if (sub == nullptr)
          throw ExpansionError("class label '" + LabelName(root_, arc.olabel) +
                               "' has no bound FST");
        arcs->push_back({kEpsilon, kEpsilon, arc.weight,
                         ReplaceState::Inside(arc.olabel, sub->Start(), arc.nextstate)});
      } else {
        arcs->push_back(
            {arc.ilabel, arc.olabel, arc.weight, ReplaceState::Root(arc.nextstate)});
      }
    }
  } else {
    const Fst *sub = binding_.Find(s.cls);
    if (sub == nullptr)
      throw ExpansionError("class label '" + LabelName(root_, s.cls) +
                           "' has no bound FST");
    for (const Arc &arc : sub->Arcs(s.inner))
      arcs->push_back({arc.ilabel, arc.olabel, arc.weight,
                       ReplaceState::Inside(s.cls, arc.nextstate, s.root)});
    if (sub->IsFinal(s.inner))
      arcs->push_back({kEpsilon, kEpsilon, sub->Final(s.inner), ReplaceState::Root(s.root)});
  }
  std::stable_sort(arcs->begin() + begin, arcs->end(),
                   [](const ViewArc<State> &a, const ViewArc<State> &b) {
                     return a.ilabel < b.ilabel;
                   });
}

bool HasClassArc(const Fst &root, const ClassLabelSet &classes, StateId q) {
  for (const Arc &arc : root.Arcs(q))
    if (classes.Contains(arc.olabel)) return true;
  return false;
}

Fst InsertEpsilonBeforeClass(const Fst &root, const ClassLabelSet &classes) {
  FstBuilder b;
  const StateId n = root.NumStates();
  for (StateId s = 0; s < n; ++s) {
    b.AddState();
    if (root.IsFinal(s)) b.SetFinal(s, root.Final(s));
  }
  std::map<std::tuple<StateId, Label, StateId>, StateId> inserted;
  for (StateId s = 0; s < n; ++s) {
    for (const Arc &arc : root.Arcs(s)) {
      if (!classes.Contains(arc.olabel)) {
        b.AddArc(s, arc);
        continue;
      }
      auto key = std::make_tuple(s, arc.olabel, arc.nextstate);
      auto it = inserted.find(key);
      if (it == inserted.end()) {
        StateId mid = b.AddState();
        b.AddArc(mid, Arc{arc.ilabel, arc.olabel, Weight::One(), arc.nextstate});
        it = inserted.emplace(key, mid).first;
      }
      b.AddArc(s, Arc{kEpsilon, kEpsilon, arc.weight, it->second});
    }
  }
  b.SetStart(root.Start());
  b.SetInputSymbols(root.InputSymbols());
  b.SetOutputSymbols(root.OutputSymbols());
  return std::move(b).Build();
}

Fst MakePlaceholderClassFst(Label temp, std::shared_ptr<const SymbolTable> syms) {
  FstBuilder b;
  StateId s0 = b.AddState(), s1 = b.AddState();
  b.SetStart(s0);
  b.AddArc(s0, Arc{temp, temp, Weight::One(), s1});
  b.SetFinal(s1, Weight::One());
  b.SetInputSymbols(syms);
  b.SetOutputSymbols(syms);
  return std::move(b).Build();
}

}  // namespace pcfst
