// pcfst/fst.cc

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

#include "pcfst/fst.h"

#include <algorithm>
#include <charconv>

#include "pcfst/errors.h"

namespace pcfst {

std::string FormatWeight(Weight w) {
  if (w.IsZero()) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w.Value());
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

bool ParseWeight(const std::string &token, Weight *w) {
  if (token == "inf" || token == "Infinity" || token == "+inf") {
    *w = Weight::Zero();
    return true;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return false;
  if (!Weight::IsValidValue(v)) return false;
  *w = Weight(v);
  return true;
}

bool Fst::operator==(const Fst &other) const {
  return start_ == other.start_ && finals_ == other.finals_ &&
         arcs_ == other.arcs_ && offsets_ == other.offsets_;
}

StateId FstBuilder::AddState() {
  finals_.push_back(Weight::Zero());
  arcs_.emplace_back();
  return NumStates() - 1;
}

void FstBuilder::EnsureState(StateId s) {
  while (NumStates() <= s) AddState();
}

void FstBuilder::SetStart(StateId s) { start_ = s; }

void FstBuilder::SetFinal(StateId s, Weight w) {
  EnsureState(s);
  finals_[s] = w;
}

void FstBuilder::AddArc(StateId s, const Arc &arc) {
  EnsureState(s);
  arcs_[s].push_back(arc);
}

Fst FstBuilder::Build() && {
  if (NumStates() == 0) throw DataError("FST has no states");
  if (start_ < 0 || start_ >= NumStates())
    throw DataError("FST start state is invalid");
  Fst fst;
  fst.start_ = start_;
  fst.finals_ = std::move(finals_);
  fst.offsets_.reserve(arcs_.size() + 1);
  fst.offsets_.push_back(0);
  size_t total = 0;
  for (const auto &list : arcs_) total += list.size();
  fst.arcs_.reserve(total);
  const StateId n = fst.NumStates();
  for (StateId s = 0; s < n; ++s) {
    auto &list = arcs_[s];
    for (const Arc &arc : list) {
      if (arc.nextstate < 0 || arc.nextstate >= n)
        throw DataError("arc from state " + std::to_string(s) +
                        " has invalid destination " + std::to_string(arc.nextstate));
      if (!Weight::IsValidValue(arc.weight.Value()))
        throw DataError("arc from state " + std::to_string(s) + " has invalid weight");
      if (arc.ilabel < 0 || arc.olabel < 0)
        throw DataError("arc from state " + std::to_string(s) + " has negative label");
    }
    std::sort(list.begin(), list.end(), ArcLess);
    fst.arcs_.insert(fst.arcs_.end(), list.begin(), list.end());
    fst.offsets_.push_back(fst.arcs_.size());
  }
  for (StateId s = 0; s < n; ++s)
    if (!Weight::IsValidValue(fst.finals_[s].Value()))
      throw DataError("state " + std::to_string(s) + " has invalid final weight");
  fst.isyms_ = std::move(isyms_);
  fst.osyms_ = std::move(osyms_);
  arcs_.clear();
  start_ = kNoStateId;
  return fst;
}

FstBuilder FstBuilder::From(const Fst &fst) {
  FstBuilder b;
  for (StateId s = 0; s < fst.NumStates(); ++s) {
    b.AddState();
    b.finals_[s] = fst.Final(s);
    b.arcs_[s].assign(fst.Arcs(s).begin(), fst.Arcs(s).end());
  }
  b.start_ = fst.Start();
  b.isyms_ = fst.InputSymbols();
  b.osyms_ = fst.OutputSymbols();
  return b;
}

Fst MakeEmptyFst(std::shared_ptr<const SymbolTable> isyms,
                 std::shared_ptr<const SymbolTable> osyms) {
  FstBuilder b;
  b.SetStart(b.AddState());
  b.SetInputSymbols(std::move(isyms));
  b.SetOutputSymbols(std::move(osyms));
  return std::move(b).Build();
}

}  // namespace pcfst
