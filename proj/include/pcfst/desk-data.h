// pcfst/desk-data.h

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

// Deterministic generator for the synthetic desk benchmark: a small
// assistant-style vocabulary, a class bigram training corpus with
// "@contact" slots, per-user contact lists and calling / non-calling test
// utterances with reference phone sequences.

#ifndef PCFST_DESK_DATA_H_
#define PCFST_DESK_DATA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pcfst/lm-build.h"

namespace pcfst {

struct Utterance {
  std::string id;
  std::string user;
  std::vector<std::string> words;   // reference transcript
  std::vector<std::string> phones;  // reference phone sequence
};

std::vector<Utterance> ReadUtterances(std::istream &is);
void WriteUtterances(const std::vector<Utterance> &utts, std::ostream &os);

struct DeskDataConfig {
  uint64_t seed = 2026;
  int num_users = 10;
  int utterances_per_user = 20;
  int contacts_per_user = 50;
  int name_pool_size = 120;
  int favorites_per_user = 3;
  int warmup_utterances = 500;
  int corpus_sentences = 1200;
  double calling_fraction = 0.5;
};

struct DeskData {
  Lexicon lexicon;
  Corpus corpus;
  std::vector<std::string> class_names;
  ContactList contacts;
  std::vector<Utterance> test;
  std::vector<Utterance> warmup;
};

DeskData GenerateDeskData(const DeskDataConfig &config);

// Writes lexicon.txt, corpus.txt, classes.txt, contacts.jsonl,
// utterances.jsonl and warmup.jsonl into `dir`.
void WriteDeskData(const DeskData &data, const std::string &dir);

// Number of ways `phones` splits into a sequence of the given
// pronunciations (capped at 2).
int CountSegmentations(const std::vector<std::string> &phones,
                       const std::vector<std::vector<std::string>> &prons);

}  // namespace pcfst

#endif  // PCFST_DESK_DATA_H_
