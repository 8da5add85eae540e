// pcfst/lm-build.cc

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

#include "pcfst/lm-build.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pcfst/determinize.h"
#include "pcfst/errors.h"
#include "pcfst/fst-ops.h"
#include "pcfst/replace.h"

namespace pcfst {

namespace {

std::vector<std::string> SplitSpaces(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// -log(num / den) computed so that equal counts give exactly +0.
double NegLogRatio(double num, double den) {
  return std::log(den) - std::log(num);
}

Label RequireSymbol(const SymbolTable &syms, const std::string &sym, const char *what) {
  Label l = syms.Find(sym);
  if (l == kNoLabel || l == kEpsilon)
    throw DataError(std::string("unknown ") + what + " '" + sym + "'");
  return l;
}

}  // namespace

Lexicon Lexicon::Read(std::istream &is) {
  Lexicon lex;
  std::set<std::string> used;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "expected 'word<TAB>phones'");
    std::string word = Trim(line.substr(0, tab));
    std::vector<std::string> phones = SplitSpaces(line.substr(tab + 1));
    if (word.empty() || phones.empty()) throw ParseError(lineno, "empty word or pronunciation");
    used.insert(phones.begin(), phones.end());
    lex.entries.emplace_back(std::move(word), std::move(phones));
  }
  used.insert(kSilencePhone);
  lex.phones.assign(used.begin(), used.end());
  lex.monophone_words = lex.phones;
  return lex;
}

void Lexicon::Validate() const {
  if (entries.empty()) throw DataError("empty lexicon");
  std::set<std::string> inventory(phones.begin(), phones.end());
  if (!inventory.count(kSilencePhone)) throw DataError("phone inventory lacks SIL");
  for (const auto &[word, pron] : entries) {
    if (pron.empty()) throw DataError("word '" + word + "' has an empty pronunciation");
    for (const std::string &p : pron)
      if (!inventory.count(p))
        throw DataError("word '" + word + "' uses phone '" + p + "' outside the inventory");
  }
  for (const std::string &p : monophone_words)
    if (!inventory.count(p)) throw DataError("monophone word '" + p + "' is not a phone");
}

ContactList ReadContacts(std::istream &is) {
  ContactList out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(lineno, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string() ||
        !j.contains("prons") || !j["prons"].is_array())
      throw ParseError(lineno, "contact needs string 'name' and array 'prons'");
    Contact c;
    c.name = j["name"].get<std::string>();
    if (j.contains("user")) {
      if (!j["user"].is_string()) throw ParseError(lineno, "'user' must be a string");
      c.user = j["user"].get<std::string>();
    }
    for (const auto &p : j["prons"]) {
      if (!p.is_string()) throw ParseError(lineno, "pronunciations must be strings");
      c.prons.push_back(SplitSpaces(p.get<std::string>()));
      if (c.prons.back().empty()) throw ParseError(lineno, "empty pronunciation");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::map<std::string, ContactList> GroupContactsByUser(const ContactList &contacts) {
  std::map<std::string, ContactList> out;
  for (const Contact &c : contacts) out[c.user].push_back(c);
  return out;
}

Corpus ReadCorpus(std::istream &is) {
  Corpus corpus;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> toks = SplitSpaces(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  return corpus;
}

std::vector<std::string> ReadClassNames(std::istream &is) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    std::string name = Trim(line);
    if (!name.empty()) out.push_back(name);
  }
  return out;
}

GraphSymbols MakeGraphSymbols(const Lexicon &lexicon, const std::vector<std::string> &class_names) {
  GraphSymbols syms{std::make_shared<SymbolTable>(), std::make_shared<SymbolTable>()};
  for (const std::string &p : lexicon.phones) syms.phones->AddSymbol(p);
  for (const auto &entry : lexicon.entries) syms.words->AddSymbol(entry.first);
  for (const std::string &p : lexicon.monophone_words) syms.words->AddSymbol(p);
  for (const std::string &c : class_names) syms.words->AddSymbol(c);
  syms.words->AddSymbol(kTempSymbol);
  return syms;
}

ClassLabelSet ResolveClasses(const std::vector<std::string> &class_names,
                             const SymbolTable &words) {
  ClassLabelSet classes;
  for (const std::string &c : class_names) classes.Add(RequireSymbol(words, c, "class"));
  return classes;
}

Fst BuildLexiconFst(const Lexicon &lexicon, const GraphSymbols &syms) {
  lexicon.Validate();
  const SymbolTable &phones = *syms.phones;
  const SymbolTable &words = *syms.words;
  std::map<std::string, int> variants;
  for (const auto &entry : lexicon.entries) ++variants[entry.first];

  FstBuilder b;
  b.SetInputSymbols(syms.phones);
  b.SetOutputSymbols(syms.words);
  const StateId loop = b.AddState();
  b.SetStart(loop);
  b.SetFinal(loop, Weight::One());

  auto add_chain = [&](const std::vector<std::string> &pron, Label word, Weight w) {
    StateId prev = loop;
    for (size_t i = 0; i < pron.size(); ++i) {
      Label p = RequireSymbol(phones, pron[i], "phone");
      StateId s = b.AddState();
      b.AddArc(prev, {p, i == 0 ? word : kEpsilon, i == 0 ? w : Weight::One(), s});
      b.AddArc(s, {p, kEpsilon, Weight::One(), s});
      prev = s;
    }
    b.AddArc(prev, {kEpsilon, kEpsilon, Weight::One(), loop});
  };

  for (const auto &[word, pron] : lexicon.entries) {
    int k = variants[word];
    add_chain(pron, RequireSymbol(words, word, "word"),
              Weight(k > 1 ? std::log(static_cast<double>(k)) : 0.0));
  }
  add_chain({kSilencePhone}, kEpsilon, Weight::One());
  for (const std::string &p : lexicon.monophone_words)
    add_chain({p}, RequireSymbol(words, p, "monophone word"), Weight::One());
  return std::move(b).Build();
}

Fst TrainBigram(const Corpus &corpus, std::shared_ptr<const SymbolTable> words) {
  if (corpus.empty()) throw DataError("empty training corpus");
  // History index 0 is the sentence start; word histories use the label.
  constexpr Label kBos = 0;
  constexpr Label kEos = -1;
  std::map<Label, std::map<Label, int>> bigrams;
  std::map<Label, int> unigrams;
  int total = 0;
  for (const auto &sentence : corpus) {
    Label prev = kBos;
    for (const std::string &tok : sentence) {
      Label w = RequireSymbol(*words, tok, "corpus token");
      ++bigrams[prev][w];
      ++unigrams[w];
      ++total;
      prev = w;
    }
    ++bigrams[prev][kEos];
    ++unigrams[kEos];
    ++total;
  }

  FstBuilder b;
  b.SetInputSymbols(words);
  b.SetOutputSymbols(words);
  const StateId bos = b.AddState();
  const StateId backoff = b.AddState();
  b.SetStart(bos);
  std::map<Label, StateId> history;
  for (const auto &[w, c] : unigrams)
    if (w != kEos) history[w] = b.AddState();
  auto state_of = [&](Label h) { return h == kBos ? bos : history.at(h); };

  for (const auto &[h, followers] : bigrams) {
    StateId src = state_of(h);
    int count = 0;
    for (const auto &[w, c] : followers) count += c;
    const double types = static_cast<double>(followers.size());
    for (const auto &[w, c] : followers) {
      Weight weight(NegLogRatio(c, count));
      if (w == kEos)
        b.SetFinal(src, weight);
      else
        b.AddArc(src, {w, w, weight, history.at(w)});
    }
    b.AddArc(src, {kEpsilon, kEpsilon, Weight(NegLogRatio(types, count + types)), backoff});
  }
  for (const auto &[w, c] : unigrams) {
    Weight weight(NegLogRatio(c, total));
    if (w == kEos)
      b.SetFinal(backoff, weight);
    else
      b.AddArc(backoff, {w, w, weight, history.at(w)});
  }
  return std::move(b).Build();
}

Fst TrainBigramRoot(const Corpus &corpus, const ClassLabelSet &classes,
                    std::shared_ptr<const SymbolTable> words) {
  return InsertEpsilonBeforeClass(TrainBigram(corpus, std::move(words)), classes);
}

std::vector<std::string> ContactTranscript(const std::vector<std::string> &pron) {
  std::vector<std::string> out = pron;
  out.push_back(kSilencePhone);
  return out;
}

ContactFstStages BuildContactFstStages(const ContactList &contacts,
                                       std::shared_ptr<const SymbolTable> words,
                                       int max_prons) {
  if (max_prons < 1) throw ConfigError("max_prons must be at least 1");
  const Label aux_base = words->Bound();
  FstBuilder b;
  b.SetInputSymbols(words);
  b.SetOutputSymbols(words);
  const StateId start = b.AddState();
  b.SetStart(start);

  // Distinct pronunciations per contact, then homophone groups across
  // contacts in first-seen order.
  std::vector<std::vector<std::vector<Label>>> prons(contacts.size());
  std::map<std::vector<Label>, std::vector<size_t>> owners;
  for (size_t i = 0; i < contacts.size(); ++i) {
    const Contact &c = contacts[i];
    if (c.prons.empty()) throw DataError("contact '" + c.name + "' has no pronunciation");
    std::set<std::vector<Label>> seen;
    for (const auto &pron : c.prons) {
      std::vector<Label> labels;
      for (const std::string &p : ContactTranscript(pron))
        labels.push_back(RequireSymbol(*words, p, "monophone word"));
      if (seen.insert(labels).second) {
        prons[i].push_back(labels);
        owners[labels].push_back(i);
      }
    }
    if (prons[i].size() > static_cast<size_t>(max_prons))
      throw DataError("contact '" + c.name + "' has " + std::to_string(prons[i].size()) +
                      " pronunciations, more than " + std::to_string(max_prons));
  }

  int num_aux = 0;
  for (size_t i = 0; i < contacts.size(); ++i) {
    Weight weight(prons[i].size() > 1 ? std::log(static_cast<double>(prons[i].size())) : 0.0);
    for (const std::vector<Label> &labels : prons[i]) {
      std::vector<Label> path = labels;
      const std::vector<size_t> &group = owners[labels];
      if (group.size() > 1) {
        int k = static_cast<int>(std::find(group.begin(), group.end(), i) - group.begin()) + 1;
        num_aux = std::max(num_aux, k);
        path.push_back(aux_base + k - 1);
      }
      StateId prev = start;
      for (Label l : path) {
        StateId s = b.AddState();
        b.AddArc(prev, {l, l, Weight::One(), s});
        prev = s;
      }
      b.SetFinal(prev, weight);
    }
  }

  ContactFstStages stages{std::move(b).Build(), MakeEmptyFst(), MakeEmptyFst(), MakeEmptyFst(),
                          aux_base, num_aux};
  stages.determinized = DeterminizeAcyclic(stages.naive);
  if (!IsInputDeterministic(stages.determinized))
    throw InvariantError("contact FST is not deterministic after disambiguation");
  stages.minimized = MinimizeAcyclic(stages.determinized);
  stages.final = ReplaceLabelsWithEpsilon(stages.minimized,
                                          [aux_base](Label l) { return l >= aux_base; });
  return stages;
}

Fst BuildContactFst(const ContactList &contacts, std::shared_ptr<const SymbolTable> words,
                    int max_prons) {
  return BuildContactFstStages(contacts, std::move(words), max_prons).final;
}

}  // namespace pcfst
