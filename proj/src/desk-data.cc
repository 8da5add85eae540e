// pcfst/desk-data.cc

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

#include "pcfst/desk-data.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pcfst/errors.h"

namespace pcfst {

namespace {

const char *const kCallingTemplates[] = {
    "call @contact",
    "call @contact now",
    "please call @contact",
    "call @contact on <line>",
    "dial @contact",
    "dial @contact please",
    "phone @contact <adverb>",
    "ring @contact at <spot>",
    "video call @contact",
    "can you call @contact",
    "text @contact <adverb>",
};

const char *const kOtherTemplates[] = {
    "what is the weather in <city>",
    "what is the weather <day>",
    "will it rain in <city> <day>",
    "play some <genre>",
    "play some <genre> music",
    "set an alarm for <number> in the <daypart>",
    "wake me up at <number>",
    "turn <onoff> the <device>",
    "turn <onoff> the <device> in the <room>",
    "remind me to <verb> the <object> <day>",
    "add <food> to my shopping list",
    "how do you cook <food>",
    "navigate to the <place>",
    "how far is the <place>",
    "what time is it in <city>",
    "open the <room> door",
    "show me the news",
    "tell me jokes",
    "volume up",
    "volume down",
    "next song",
    "stop the music",
    "how hot is it outside",
};

struct Slot {
  const char *name;
  const char *values;
};

const Slot kSlots[] = {
    {"<line>", "mobile home work"},
    {"<adverb>", "now later tonight soon"},
    {"<spot>", "home work office"},
    {"<city>", "paris london tokyo berlin madrid rome boston chicago seattle denver dallas "
               "miami austin toronto sydney"},
    {"<day>", "today tomorrow monday tuesday wednesday thursday friday saturday sunday"},
    {"<genre>", "jazz rock blues pop classical country reggae metal soul funk folk techno"},
    {"<number>", "one two three four five six seven eight nine ten eleven twelve"},
    {"<daypart>", "morning evening"},
    {"<onoff>", "on off"},
    {"<device>", "lights fan heater radio television oven kettle speaker lamp blinds"},
    {"<room>", "kitchen bedroom bathroom garage hallway office basement garden"},
    {"<verb>", "buy clean fix feed water pay wash pack read cook visit"},
    {"<object>", "milk bread eggs cheese apples rice coffee tea bills plants dog cat car "
                 "laundry dishes books flowers"},
    {"<food>", "pasta soup chicken salad pizza curry noodles tacos pancakes cookies steak fish "
               "beans potatoes carrots"},
    {"<place>", "airport station hospital school library museum pharmacy bakery bank beach "
                "park stadium"},
};

const char *const kRarePhones[] = {"zh", "oy", "ng", "aw"};
const char *const kNameConsonants[] = {"b", "d", "f", "g", "k", "l", "m",
                                       "n", "p", "r", "s", "t", "v", "z"};
const char *const kNameVowels[] = {"a", "e", "i", "o", "u"};

std::vector<std::string> Split(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string Join(const std::vector<std::string> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i];
  }
  return out;
}

// Rough letter-to-phone spelling with repeated phones collapsed.
std::vector<std::string> SpellPhones(const std::string &word) {
  std::vector<std::string> out;
  auto push = [&out](const std::string &p) {
    if (out.empty() || out.back() != p) out.push_back(p);
  };
  for (size_t i = 0; i < word.size();) {
    std::string two = word.substr(i, 2);
    if (two == "sh" || two == "ch" || two == "th") {
      push(two);
      i += 2;
      continue;
    }
    if (two == "ph") {
      push("f");
      i += 2;
      continue;
    }
    char c = word[i];
    if (c == 'c' || c == 'q') {
      push("k");
    } else if (c == 'x') {
      push("k");
      push("s");
    } else if (c == 'y') {
      push(i == 0 ? "y" : "i");
    } else {
      push(std::string(1, c));
    }
    ++i;
  }
  return out;
}

template <typename T, size_t N>
const T &Pick(const T (&arr)[N], std::mt19937_64 &rng) {
  return arr[std::uniform_int_distribution<size_t>(0, N - 1)(rng)];
}

size_t PickIndex(size_t n, std::mt19937_64 &rng) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

struct Name {
  std::string display;
  std::vector<std::vector<std::string>> prons;
};

std::string Capitalize(const std::vector<std::string> &phones) {
  std::string s;
  for (const std::string &p : phones) s += p;
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

const std::vector<std::string> *SlotValues(const std::string &token) {
  static const std::map<std::string, std::vector<std::string>> *slots = [] {
    auto *m = new std::map<std::string, std::vector<std::string>>;
    for (const Slot &slot : kSlots) (*m)[slot.name] = Split(slot.values);
    return m;
  }();
  auto it = slots->find(token);
  return it == slots->end() ? nullptr : &it->second;
}

// Replaces every slot token with a random value; `forced` pins one slot.
std::vector<std::string> FillTemplate(const std::vector<std::string> &tmpl, std::mt19937_64 &rng,
                                      const std::string &forced_slot = "",
                                      const std::string &forced_value = "") {
  std::vector<std::string> out;
  for (const std::string &tok : tmpl) {
    const std::vector<std::string> *values = SlotValues(tok);
    if (values == nullptr)
      out.push_back(tok);
    else if (tok == forced_slot)
      out.push_back(forced_value);
    else
      out.push_back((*values)[PickIndex(values->size(), rng)]);
  }
  return out;
}

}  // namespace

int CountSegmentations(const std::vector<std::string> &phones,
                       const std::vector<std::vector<std::string>> &prons) {
  std::vector<int> ways(phones.size() + 1, 0);
  ways[0] = 1;
  for (size_t i = 0; i < phones.size(); ++i) {
    if (ways[i] == 0) continue;
    for (const auto &pron : prons) {
      if (pron.empty() || i + pron.size() > phones.size()) continue;
      if (!std::equal(pron.begin(), pron.end(), phones.begin() + i)) continue;
      ways[i + pron.size()] = std::min(2, ways[i + pron.size()] + ways[i]);
    }
  }
  return ways[phones.size()];
}

std::vector<Utterance> ReadUtterances(std::istream &is) {
  std::vector<Utterance> out;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(lineno, std::string("bad JSON: ") + e.what());
    }
    for (const char *key : {"id", "user", "words", "phones"})
      if (!j.contains(key) || !j[key].is_string())
        throw ParseError(lineno, std::string("missing string field '") + key + "'");
    Utterance u{j["id"], j["user"], Split(j["words"]), Split(j["phones"])};
    if (u.phones.empty()) throw ParseError(lineno, "utterance without phones");
    if (!ids.insert(u.id).second) throw ParseError(lineno, "duplicate utterance id " + u.id);
    out.push_back(std::move(u));
  }
  return out;
}

void WriteUtterances(const std::vector<Utterance> &utts, std::ostream &os) {
  for (const Utterance &u : utts) {
    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["user"] = u.user;
    j["words"] = Join(u.words);
    j["phones"] = Join(u.phones);
    os << j.dump() << '\n';
  }
}

DeskData GenerateDeskData(const DeskDataConfig &config) {
  if (config.num_users < 1 || config.utterances_per_user < 1 || config.contacts_per_user < 4 ||
      config.name_pool_size < config.contacts_per_user || config.favorites_per_user < 1)
    throw ConfigError("invalid desk data configuration");
  std::mt19937_64 rng(config.seed);
  DeskData data;
  data.class_names = {"@contact"};

  std::vector<std::vector<std::string>> calling;
  std::vector<std::vector<std::string>> other;
  for (const char *t : kCallingTemplates) calling.push_back(Split(t));
  for (const char *t : kOtherTemplates) other.push_back(Split(t));

  // Vocabulary, in first-use order over templates and slot values.
  std::vector<std::string> vocab;
  std::set<std::string> seen;
  auto add_word = [&](const std::string &w) {
    if (w[0] != '@' && w[0] != '<' && seen.insert(w).second) vocab.push_back(w);
  };
  for (const auto &group : {calling, other})
    for (const auto &t : group)
      for (const std::string &w : t) add_word(w);
  for (const Slot &slot : kSlots)
    for (const std::string &w : Split(slot.values)) add_word(w);
  for (const std::string &w : vocab) data.lexicon.entries.emplace_back(w, SpellPhones(w));
  data.lexicon.entries.emplace_back("tomorrow", Split("t u m o r o"));

  // Long words built from phones the test utterances never use.
  std::vector<std::string> long_words;
  for (int i = 0; i < 6; ++i) {
    std::vector<std::string> pron;
    size_t len = 12 + 2 * i;
    while (pron.size() < len) {
      std::string p = Pick(kRarePhones, rng);
      if (pron.empty() || pron.back() != p) pron.push_back(p);
    }
    std::string word;
    for (const std::string &p : pron) word += p;
    long_words.push_back(word);
    data.lexicon.entries.emplace_back(word, pron);
  }

  std::set<std::string> phones{kSilencePhone};
  for (const auto &e : data.lexicon.entries) phones.insert(e.second.begin(), e.second.end());
  for (const char *p : kNameConsonants) phones.insert(p);
  for (const char *p : kNameVowels) phones.insert(p);
  data.lexicon.phones.assign(phones.begin(), phones.end());
  data.lexicon.monophone_words = data.lexicon.phones;

  std::vector<std::vector<std::string>> word_prons;
  std::map<std::string, std::vector<std::string>> first_pron;
  for (const auto &[w, p] : data.lexicon.entries) {
    word_prons.push_back(p);
    first_pron.emplace(w, p);
  }

  // Training corpus: every slot value at least once per template using
  // it, then random sentences.
  for (const auto &group : {calling, other})
    for (const auto &t : group) {
      bool has_slot = false;
      for (const std::string &tok : t)
        if (const std::vector<std::string> *values = SlotValues(tok)) {
          has_slot = true;
          for (const std::string &v : *values) data.corpus.push_back(FillTemplate(t, rng, tok, v));
        }
      if (!has_slot) data.corpus.push_back(t);
    }
  {
    std::bernoulli_distribution corpus_calling(0.1);
    for (int i = 0; i < config.corpus_sentences; ++i) {
      const auto &group = corpus_calling(rng) ? calling : other;
      data.corpus.push_back(FillTemplate(group[PickIndex(group.size(), rng)], rng));
    }
  }
  for (const std::string &w : long_words) {
    data.corpus.push_back({"play", w});
    data.corpus.push_back({w, "now"});
  }

  // Name pool. The first four pairs are homophones.
  std::vector<Name> pool;
  std::set<std::vector<std::string>> used_prons;
  std::set<std::string> used_names;
  auto random_name_pron = [&]() {
    std::vector<std::string> pron;
    int syllables = 2 + static_cast<int>(PickIndex(2, rng));
    for (int s = 0; s < syllables; ++s) {
      pron.push_back(Pick(kNameConsonants, rng));
      pron.push_back(Pick(kNameVowels, rng));
    }
    return pron;
  };
  auto acceptable = [&](const std::vector<std::string> &pron) {
    return !used_prons.count(pron) && CountSegmentations(pron, word_prons) == 0;
  };
  auto variants = [&](const std::vector<std::string> &base, int count) {
    std::vector<std::vector<std::string>> out{base};
    for (int tries = 0; static_cast<int>(out.size()) < count && tries < 100; ++tries) {
      std::vector<std::string> v = base;
      size_t pos = 2 * PickIndex(base.size() / 2, rng) + 1;  // a vowel slot
      v[pos] = Pick(kNameVowels, rng);
      if (acceptable(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    for (const auto &v : out) used_prons.insert(v);
    return out;
  };
  while (static_cast<int>(pool.size()) < config.name_pool_size) {
    std::vector<std::string> base = random_name_pron();
    std::string display = Capitalize(base);
    if (!acceptable(base) || used_names.count(display)) continue;
    const int index = static_cast<int>(pool.size());
    int count = index == 8 ? 5 : 1 + static_cast<int>(PickIndex(3, rng));
    if (index < 8 && index % 2 == 1) {
      // Homophone partner: same first pronunciation, different spelling.
      const Name &partner = pool.back();
      display = partner.display + "h";
      pool.push_back({display, {partner.prons.front()}});
      used_names.insert(display);
      continue;
    }
    used_names.insert(display);
    pool.push_back({display, variants(base, count)});
  }

  // Users and their contact lists.
  std::vector<std::string> users;
  std::map<std::string, std::vector<size_t>> user_contacts;
  for (int u = 0; u < config.num_users; ++u) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "user%02d", u + 1);
    users.push_back(buf);
    std::vector<size_t> rest;
    for (size_t i = 4; i < pool.size(); ++i) rest.push_back(i);
    // Two homophone pairs per user, alternating between the four pairs.
    std::vector<size_t> chosen = u % 2 == 0 ? std::vector<size_t>{0, 1, 2, 3}
                                            : std::vector<size_t>{4, 5, 6, 7};
    rest.erase(std::remove_if(rest.begin(), rest.end(),
                              [&](size_t i) {
                                return std::find(chosen.begin(), chosen.end(), i) != chosen.end();
                              }),
               rest.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    for (size_t i = 0; chosen.size() < static_cast<size_t>(config.contacts_per_user); ++i)
      chosen.push_back(rest[i]);
    std::sort(chosen.begin(), chosen.end());
    user_contacts[buf] = chosen;
    for (size_t i : chosen) data.contacts.push_back({buf, pool[i].display, pool[i].prons});
  }

  // Builds an utterance from a template; returns false if the phone string
  // can be read as more than one word sequence.
  auto realize = [&](const std::vector<std::string> &pattern, const Name *name, size_t pron_index,
                     const std::vector<size_t> &segmentation_names, Utterance *utt) {
    std::vector<std::string> core;
    utt->words.clear();
    for (const std::string &w : FillTemplate(pattern, rng)) {
      if (w == "@contact") {
        std::vector<std::string> tr = ContactTranscript(name->prons[pron_index]);
        utt->words.insert(utt->words.end(), tr.begin(), tr.end());
        core.insert(core.end(), tr.begin(), tr.end());
      } else {
        utt->words.push_back(w);
        const auto &p = first_pron.at(w);
        core.insert(core.end(), p.begin(), p.end());
      }
    }
    std::vector<std::vector<std::string>> tokens = word_prons;
    for (size_t i : segmentation_names)
      for (const auto &p : pool[i].prons) tokens.push_back(ContactTranscript(p));
    if (CountSegmentations(core, tokens) != 1) return false;
    utt->phones = {kSilencePhone};
    utt->phones.insert(utt->phones.end(), core.begin(), core.end());
    utt->phones.push_back(kSilencePhone);
    return true;
  };

  std::bernoulli_distribution is_calling(config.calling_fraction);
  std::bernoulli_distribution use_favorite(0.7);
  for (const std::string &user : users) {
    const std::vector<size_t> &contacts = user_contacts[user];
    for (int t = 0; t < config.utterances_per_user; ++t) {
      Utterance utt;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s-%02d", user.c_str(), t + 1);
      utt.id = buf;
      utt.user = user;
      for (int tries = 0;; ++tries) {
        if (tries > 1000) throw InvariantError("cannot generate an unambiguous utterance");
        if (is_calling(rng)) {
          size_t c = use_favorite(rng)
                         ? contacts[4 + PickIndex(config.favorites_per_user, rng)]
                         : contacts[PickIndex(contacts.size(), rng)];
          const Name &name = pool[c];
          if (realize(calling[PickIndex(calling.size(), rng)], &name,
                      PickIndex(name.prons.size(), rng), contacts, &utt))
            break;
        } else if (realize(other[PickIndex(other.size(), rng)], nullptr, 0, {}, &utt)) {
          break;
        }
      }
      data.test.push_back(std::move(utt));
    }
  }

  std::vector<size_t> all_names(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) all_names[i] = i;
  for (int w = 0; w < config.warmup_utterances; ++w) {
    Utterance utt;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "warmup-%03d", w + 1);
    utt.id = buf;
    utt.user = "warmup";
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw InvariantError("cannot generate an unambiguous utterance");
      if (is_calling(rng)) {
        const Name &name = pool[PickIndex(pool.size(), rng)];
        if (realize(calling[PickIndex(calling.size(), rng)], &name,
                    PickIndex(name.prons.size(), rng), all_names, &utt))
          break;
      } else if (realize(other[PickIndex(other.size(), rng)], nullptr, 0, {}, &utt)) {
        break;
      }
    }
    data.warmup.push_back(std::move(utt));
  }
  return data;
}

void WriteDeskData(const DeskData &data, const std::string &dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char *name) {
    std::ofstream os(fs::path(dir) / name);
    if (!os) throw ResourceError(std::string("cannot write ") + (fs::path(dir) / name).string());
    return os;
  };
  {
    std::ofstream os = open("lexicon.txt");
    for (const auto &[w, p] : data.lexicon.entries) os << w << '\t' << Join(p) << '\n';
  }
  {
    std::ofstream os = open("phones.txt");
    for (const std::string &p : data.lexicon.phones) os << p << '\n';
  }
  {
    std::ofstream os = open("corpus.txt");
    for (const auto &s : data.corpus) os << Join(s) << '\n';
  }
  {
    std::ofstream os = open("classes.txt");
    for (const std::string &c : data.class_names) os << c << '\n';
  }
  {
    std::ofstream os = open("contacts.jsonl");
    for (const Contact &c : data.contacts) {
      nlohmann::ordered_json j;
      j["user"] = c.user;
      j["name"] = c.name;
      j["prons"] = nlohmann::json::array();
      for (const auto &p : c.prons) j["prons"].push_back(Join(p));
      os << j.dump() << '\n';
    }
  }
  {
    std::ofstream os = open("utterances.jsonl");
    WriteUtterances(data.test, os);
  }
  {
    std::ofstream os = open("warmup.jsonl");
    WriteUtterances(data.warmup, os);
  }
}

}  // namespace pcfst
