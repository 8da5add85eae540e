// pcfst/fst-io.cc

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

#include "pcfst/fst-io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "pcfst/errors.h"

namespace pcfst {

namespace {

std::vector<std::string> SplitFields(const std::string &line) {
  std::vector<std::string> fields;
  std::istringstream is(line);
  std::string f;
  while (is >> f) fields.push_back(f);
  return fields;
}

StateId ParseStateId(const std::string &token, int lineno) {
  StateId s = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), s);
  if (ec != std::errc() || ptr != token.data() + token.size() || s < 0)
    throw ParseError(lineno, "bad state id '" + token + "'");
  return s;
}

Label ParseLabel(const std::string &token, const SymbolTable *syms,
                 const char *side, int lineno) {
  if (syms != nullptr) {
    Label l = syms->Find(token);
    if (l == kNoLabel)
      throw ParseError(lineno, std::string("unknown ") + side + " symbol '" + token + "'");
    return l;
  }
  Label l = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), l);
  if (ec != std::errc() || ptr != token.data() + token.size() || l < 0)
    throw ParseError(lineno, std::string("bad ") + side + " label '" + token + "'");
  return l;
}

Weight ParseWeightField(const std::string &token, int lineno) {
  Weight w;
  if (!ParseWeight(token, &w)) throw ParseError(lineno, "bad weight '" + token + "'");
  return w;
}

std::string LabelText(Label l, const SymbolTable *syms) {
  return syms != nullptr ? syms->Symbol(l) : std::to_string(l);
}

}  // namespace

Fst ReadTextFst(std::istream &is, std::shared_ptr<const SymbolTable> isyms,
                std::shared_ptr<const SymbolTable> osyms) {
  FstBuilder b;
  std::string line;
  int lineno = 0;
  bool seen_any = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::vector<std::string> f = SplitFields(line);
    if (f.empty()) continue;
    if (f.size() == 1 || f.size() == 2) {
      StateId s = ParseStateId(f[0], lineno);
      Weight w = f.size() == 2 ? ParseWeightField(f[1], lineno) : Weight::One();
      b.EnsureState(s);
      if (!w.IsZero()) b.SetFinal(s, w);
      if (!seen_any) b.SetStart(s);
    } else if (f.size() == 4 || f.size() == 5) {
      StateId src = ParseStateId(f[0], lineno);
      StateId dst = ParseStateId(f[1], lineno);
      Label il = ParseLabel(f[2], isyms.get(), "input", lineno);
      Label ol = ParseLabel(f[3], osyms.get(), "output", lineno);
      Weight w = f.size() == 5 ? ParseWeightField(f[4], lineno) : Weight::One();
      b.EnsureState(std::max(src, dst));
      b.AddArc(src, Arc{il, ol, w, dst});
      if (!seen_any) b.SetStart(src);
    } else {
      throw ParseError(lineno, "expected 1, 2, 4 or 5 fields, got " +
                                   std::to_string(f.size()));
    }
    seen_any = true;
  }
  if (!seen_any) throw ParseError(lineno, "no states");
  b.SetInputSymbols(std::move(isyms));
  b.SetOutputSymbols(std::move(osyms));
  return std::move(b).Build();
}

Fst ReadTextFst(const std::string &text, std::shared_ptr<const SymbolTable> isyms,
                std::shared_ptr<const SymbolTable> osyms) {
  std::istringstream is(text);
  return ReadTextFst(is, std::move(isyms), std::move(osyms));
}

void WriteTextFst(const Fst &fst, std::ostream &os) {
  const SymbolTable *isyms = fst.InputSymbols().get();
  const SymbolTable *osyms = fst.OutputSymbols().get();
  const StateId n = fst.NumStates();
  bool last_mentioned = false;
  auto write_state = [&](StateId s) {
    for (const Arc &arc : fst.Arcs(s)) {
      os << s << ' ' << arc.nextstate << ' ' << LabelText(arc.ilabel, isyms) << ' '
         << LabelText(arc.olabel, osyms) << ' ' << FormatWeight(arc.weight) << '\n';
      if (arc.nextstate == n - 1) last_mentioned = true;
    }
    if (fst.IsFinal(s)) os << s << ' ' << FormatWeight(fst.Final(s)) << '\n';
    if (s == n - 1 && (fst.NumArcs(s) > 0 || fst.IsFinal(s))) last_mentioned = true;
  };
  const StateId start = fst.Start();
  if (fst.NumArcs(start) == 0 && !fst.IsFinal(start)) {
    os << start << " inf\n";
    if (start == n - 1) last_mentioned = true;
  }
  write_state(start);
  for (StateId s = 0; s < n; ++s)
    if (s != start) write_state(s);
  if (!last_mentioned) os << (n - 1) << " inf\n";
}

std::string WriteTextFst(const Fst &fst) {
  std::ostringstream os;
  WriteTextFst(fst, os);
  return os.str();
}

Fst ReadTextFstFile(const std::string &path, std::shared_ptr<const SymbolTable> isyms,
                    std::shared_ptr<const SymbolTable> osyms) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open FST file '" + path + "'");
  try {
    return ReadTextFst(is, std::move(isyms), std::move(osyms));
  } catch (const ParseError &e) {
    throw DataError(path + ": " + e.what());
  }
}

void WriteTextFstFile(const Fst &fst, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write FST file '" + path + "'");
  WriteTextFst(fst, os);
}

SymbolTable ReadSymbolTableFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open symbol table '" + path + "'");
  try {
    return SymbolTable::ReadText(is);
  } catch (const ParseError &e) {
    throw DataError(path + ": " + e.what());
  }
}

void WriteSymbolTableFile(const SymbolTable &syms, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write symbol table '" + path + "'");
  syms.WriteText(os);
}

}  // namespace pcfst
