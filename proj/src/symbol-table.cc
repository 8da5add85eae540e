// pcfst/symbol-table.cc

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

#include "pcfst/symbol-table.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "pcfst/errors.h"

namespace pcfst {

SymbolTable::SymbolTable() {
  symbols_.push_back(kEpsilonSymbol);
  index_.emplace(kEpsilonSymbol, kEpsilon);
}

Label SymbolTable::AddSymbol(std::string_view symbol) {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  Label id = Bound();
  symbols_.emplace_back(symbol);
  index_.emplace(std::string(symbol), id);
  return id;
}

void SymbolTable::AddSymbol(std::string_view symbol, Label id) {
  if (id < 0) throw DataError("negative symbol id for '" + std::string(symbol) + "'");
  if (symbol.empty()) throw DataError("empty symbol");
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) {
    if (it->second == id) return;
    throw DataError("symbol '" + std::string(symbol) + "' has two ids");
  }
  if (static_cast<size_t>(id) >= symbols_.size()) symbols_.resize(id + 1);
  if (!symbols_[id].empty())
    throw DataError("id " + std::to_string(id) + " used by two symbols");
  symbols_[id] = std::string(symbol);
  index_.emplace(std::string(symbol), id);
}

Label SymbolTable::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kNoLabel : it->second;
}

bool SymbolTable::HasLabel(Label label) const {
  return label >= 0 && static_cast<size_t>(label) < symbols_.size() &&
         !symbols_[label].empty();
}

const std::string &SymbolTable::Symbol(Label label) const {
  if (!HasLabel(label))
    throw DataError("no symbol for label " + std::to_string(label));
  return symbols_[label];
}

SymbolTable SymbolTable::ReadText(std::istream &is) {
  SymbolTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string symbol, id_str, extra;
    if (!(fields >> symbol >> id_str) || (fields >> extra))
      throw ParseError(lineno, "expected 'symbol<TAB>id'");
    Label id = 0;
    auto [ptr, ec] = std::from_chars(id_str.data(), id_str.data() + id_str.size(), id);
    if (ec != std::errc() || ptr != id_str.data() + id_str.size())
      throw ParseError(lineno, "bad symbol id '" + id_str + "'");
    if (id == kEpsilon && symbol != kEpsilonSymbol)
      throw ParseError(lineno, "id 0 is reserved for <eps>");
    try {
      table.AddSymbol(symbol, id);
    } catch (const DataError &e) {
      throw ParseError(lineno, e.what());
    }
  }
  return table;
}

void SymbolTable::WriteText(std::ostream &os) const {
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (!symbols_[i].empty()) os << symbols_[i] << '\t' << i << '\n';
}

void ClassLabelSet::Add(Label label) {
  if (label <= 0) throw DataError("epsilon cannot be a class label");
  if (static_cast<size_t>(label) >= bits_.size()) bits_.resize(label + 1, false);
  if (bits_[label]) return;
  bits_[label] = true;
  labels_.push_back(label);
  std::sort(labels_.begin(), labels_.end());
}

ClassLabelSet ClassLabelSet::ReadManifest(std::istream &is,
                                          const SymbolTable &syms) {
  ClassLabelSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    Label label = syms.Find(name);
    if (label == kNoLabel)
      throw ParseError(lineno, "class '" + name + "' not in symbol table");
    set.Add(label);
  }
  return set;
}

}  // namespace pcfst
