// pcfst/fst.h

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

#ifndef PCFST_FST_H_
#define PCFST_FST_H_

#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "pcfst/symbol-table.h"
#include "pcfst/weight.h"

namespace pcfst {

struct Arc {
  Label ilabel;
  Label olabel;
  Weight weight;
  StateId nextstate;

  friend bool operator==(const Arc &a, const Arc &b) = default;
};

// Canonical arc order: (ilabel, olabel, nextstate, weight).
inline bool ArcLess(const Arc &a, const Arc &b) {
  return std::tie(a.ilabel, a.olabel, a.nextstate) <
             std::tie(b.ilabel, b.olabel, b.nextstate) ||
         (std::tie(a.ilabel, a.olabel, a.nextstate) ==
              std::tie(b.ilabel, b.olabel, b.nextstate) &&
          a.weight.Value() < b.weight.Value());
}

// Immutable weighted transducer with dense state ids, a single start state
// (initial weight One) and per-state arc lists sorted by ArcLess. Built with
// FstBuilder; safe for any number of concurrent readers.
class Fst {
 public:
  StateId Start() const { return start_; }
  StateId NumStates() const { return static_cast<StateId>(finals_.size()); }
  Weight Final(StateId s) const { return finals_[s]; }
  bool IsFinal(StateId s) const { return !finals_[s].IsZero(); }

  std::span<const Arc> Arcs(StateId s) const {
    return {arcs_.data() + offsets_[s], arcs_.data() + offsets_[s + 1]};
  }
  size_t NumArcs(StateId s) const { return offsets_[s + 1] - offsets_[s]; }
  size_t NumArcs() const { return arcs_.size(); }

  // May be null; text I/O then uses raw integer labels.
  const std::shared_ptr<const SymbolTable> &InputSymbols() const { return isyms_; }
  const std::shared_ptr<const SymbolTable> &OutputSymbols() const { return osyms_; }

  // Structural equality (same numbering, arcs, finals). Symbol tables are
  // not compared.
  bool operator==(const Fst &other) const;

 private:
  friend class FstBuilder;
  Fst() = default;

  StateId start_ = kNoStateId;
  std::vector<Weight> finals_;
  std::vector<Arc> arcs_;
  std::vector<size_t> offsets_;
  std::shared_ptr<const SymbolTable> isyms_;
  std::shared_ptr<const SymbolTable> osyms_;
};

// Mutable construction buffer for Fst.
class FstBuilder {
 public:
  FstBuilder() = default;

  StateId AddState();
  // Grows the state set so that `s` is valid.
  void EnsureState(StateId s);
  void SetStart(StateId s);
  void SetFinal(StateId s, Weight w);
  void AddArc(StateId s, const Arc &arc);

  StateId NumStates() const { return static_cast<StateId>(finals_.size()); }
  StateId Start() const { return start_; }
  Weight Final(StateId s) const { return finals_[s]; }
  const std::vector<Arc> &Arcs(StateId s) const { return arcs_[s]; }
  std::vector<Arc> &MutableArcs(StateId s) { return arcs_[s]; }

  void SetInputSymbols(std::shared_ptr<const SymbolTable> syms) { isyms_ = std::move(syms); }
  void SetOutputSymbols(std::shared_ptr<const SymbolTable> syms) { osyms_ = std::move(syms); }

  // Sorts arcs and validates: at least one state, a valid start, valid
  // destinations, non-negative weights. Throws DataError otherwise.
  Fst Build() &&;

  // Copies `fst` into a builder for modification.
  static FstBuilder From(const Fst &fst);

 private:
  StateId start_ = kNoStateId;
  std::vector<Weight> finals_;
  std::vector<std::vector<Arc>> arcs_;
  std::shared_ptr<const SymbolTable> isyms_;
  std::shared_ptr<const SymbolTable> osyms_;
};

// A one-state, non-final FST: accepts nothing.
Fst MakeEmptyFst(std::shared_ptr<const SymbolTable> isyms = nullptr,
                 std::shared_ptr<const SymbolTable> osyms = nullptr);

}  // namespace pcfst

#endif  // PCFST_FST_H_
