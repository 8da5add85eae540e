// pcfst/symbol-table.h

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

#ifndef PCFST_SYMBOL_TABLE_H_
#define PCFST_SYMBOL_TABLE_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcfst/weight.h"

namespace pcfst {

// Bidirectional string <-> label map. Label 0 is always "<eps>".
class SymbolTable {
 public:
  static constexpr const char *kEpsilonSymbol = "<eps>";

  SymbolTable();

  // Returns the existing label if the symbol is already present.
  Label AddSymbol(std::string_view symbol);
  // Adds with an explicit id; throws DataError on id or symbol clash.
  void AddSymbol(std::string_view symbol, Label id);

  Label Find(std::string_view symbol) const;  // kNoLabel if absent
  const std::string &Symbol(Label label) const;  // throws if absent
  bool HasLabel(Label label) const;

  // One past the largest id in use.
  Label Bound() const { return static_cast<Label>(symbols_.size()); }
  size_t NumSymbols() const { return index_.size(); }

  // "symbol<TAB>id" lines.
  static SymbolTable ReadText(std::istream &is);
  void WriteText(std::ostream &os) const;

  bool operator==(const SymbolTable &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;  // "" marks an unused id
  std::unordered_map<std::string, Label> index_;
};

// The declared set of class (non-terminal) labels; O(1) membership.
class ClassLabelSet {
 public:
  ClassLabelSet() = default;

  void Add(Label label);
  bool Contains(Label label) const {
    return label > 0 && static_cast<size_t>(label) < bits_.size() &&
           bits_[label];
  }
  const std::vector<Label> &Labels() const { return labels_; }
  bool Empty() const { return labels_.empty(); }

  // Reads a manifest (one class symbol per line) resolving names against
  // `syms`. Unknown names are a DataError.
  static ClassLabelSet ReadManifest(std::istream &is, const SymbolTable &syms);

 private:
  std::vector<bool> bits_;
  std::vector<Label> labels_;
};

}  // namespace pcfst

#endif  // PCFST_SYMBOL_TABLE_H_
