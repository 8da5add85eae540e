// pcfst/lm-build.h

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

// Construction of the desk-scale recognition graph components: the lexicon
// transducer (phones to words), the backoff bigram class root and the
// per-user monophone contact FSTs.

#ifndef PCFST_LM_BUILD_H_
#define PCFST_LM_BUILD_H_

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pcfst/fst.h"
#include "pcfst/symbol-table.h"

namespace pcfst {

constexpr const char *kSilencePhone = "SIL";
constexpr const char *kTempSymbol = "<temp>";

struct Lexicon {
  // (word, phones) in file order; a word may have several entries.
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
  // Phone inventory, always containing SIL.
  std::vector<std::string> phones;
  // Phones that are also words (the transcript of a contact name).
  std::vector<std::string> monophone_words;

  // Reads "word<TAB>phone phone ..." lines. The inventory becomes the
  // sorted set of phones used plus SIL, and every phone is a monophone
  // word. Throws ParseError on malformed lines.
  static Lexicon Read(std::istream &is);
  // Throws DataError if empty or if a phone is outside the inventory.
  void Validate() const;
};

struct Contact {
  std::string user;
  std::string name;
  std::vector<std::vector<std::string>> prons;
};
typedef std::vector<Contact> ContactList;

// JSON lines: {"user": ..., "name": ..., "prons": ["j u n", ...]}.
ContactList ReadContacts(std::istream &is);
// Contacts grouped by user, users in sorted order, contacts in file order.
std::map<std::string, ContactList> GroupContactsByUser(const ContactList &contacts);

typedef std::vector<std::vector<std::string>> Corpus;
// One sentence per line, tokens separated by spaces; blank lines skipped.
Corpus ReadCorpus(std::istream &is);

// One class symbol per line, e.g. "@contact".
std::vector<std::string> ReadClassNames(std::istream &is);

struct GraphSymbols {
  std::shared_ptr<SymbolTable> phones;
  std::shared_ptr<SymbolTable> words;
};

// Phones: <eps> then the inventory. Words: <eps>, lexicon words, monophone
// words, class names, <temp>.
GraphSymbols MakeGraphSymbols(const Lexicon &lexicon, const std::vector<std::string> &class_names);

// Resolves class names against the word table. Throws DataError on
// unknown names.
ClassLabelSet ResolveClasses(const std::vector<std::string> &class_names,
                             const SymbolTable &words);

// Loop-state lexicon transducer: one chain per pronunciation, with a
// self-loop on every phone state (a phone may last several frames), the
// word on the first arc and -log(1/k) for k variants; optional SIL between
// words; single-arc chains p:"p" for monophone words.
Fst BuildLexiconFst(const Lexicon &lexicon, const GraphSymbols &syms);

// Witten-Bell backoff bigram acceptor over `words`, start state = sentence
// start history. Class tokens are ordinary words here.
Fst TrainBigram(const Corpus &corpus, std::shared_ptr<const SymbolTable> words);
// TrainBigram followed by InsertEpsilonBeforeClass.
Fst TrainBigramRoot(const Corpus &corpus, const ClassLabelSet &classes,
                    std::shared_ptr<const SymbolTable> words);

struct ContactFstStages {
  Fst naive;          // union of paths with disambiguation labels
  Fst determinized;
  Fst minimized;
  Fst final;          // disambiguation labels replaced by epsilon
  Label first_aux_label;  // disambiguation labels are >= this
  int num_aux = 0;        // largest "#k" index used
};

// Each pronunciation becomes its monophone words followed by the SIL word;
// its weight -log(1/k) sits on the final state. Names sharing a
// pronunciation get "#1", "#2", ... appended. Throws DataError for a name
// without pronunciations, more than `max_prons` pronunciations, or phones
// that are not monophone words.
ContactFstStages BuildContactFstStages(const ContactList &contacts,
                                       std::shared_ptr<const SymbolTable> words,
                                       int max_prons = 5);
Fst BuildContactFst(const ContactList &contacts, std::shared_ptr<const SymbolTable> words,
                    int max_prons = 5);

// Word sequence that spells `pron` in the decoder output.
std::vector<std::string> ContactTranscript(const std::vector<std::string> &pron);

}  // namespace pcfst

#endif  // PCFST_LM_BUILD_H_
