// tests/test-harness.cc

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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pcfst/errors.h"
#include "pcfst/fst-io.h"
#include "pcfst/harness.h"
#include "test-util.h"

using namespace pcfst;
using namespace pcfst::testing;

namespace fs = std::filesystem;

namespace {

std::vector<std::string> Words(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

const DeskGraph &Desk() {
  static const DeskGraph graph =
      BuildDeskGraph(DeskConfig::Load(fs::path(PCFST_DESK_DIR) / "desk.json"));
  return graph;
}

std::vector<Utterance> DeskUtterances(size_t n) {
  std::vector<Utterance> utts = LoadUtterances(fs::path(PCFST_DESK_DIR) / "utterances.jsonl");
  if (utts.size() > n) utts.resize(n);
  return utts;
}

}  // namespace

TEST_CASE("word alignment counts") {
  EditCounts e = AlignWords(Words("a b c"), Words("a x c"));
  CHECK(e.substitutions == 1);
  CHECK(e.insertions == 0);
  CHECK(e.deletions == 0);
  CHECK(e.reference_words == 3);

  e = AlignWords(Words("a b c"), Words("a c"));
  CHECK(e.deletions == 1);
  CHECK(e.Errors() == 1);

  e = AlignWords(Words("a b"), Words("a b c"));
  CHECK(e.insertions == 1);
  CHECK(e.Errors() == 1);

  e = AlignWords(Words("a b c d"), {});
  CHECK(e.deletions == 4);
  CHECK(e.Wer() == doctest::Approx(100.0));

  e = AlignWords(Words("a b c d"), Words("b c d e"));
  CHECK(e.Errors() == 2);

  e = AlignWords(Words("a b"), Words("x y z"));
  CHECK(e.substitutions == 2);
  CHECK(e.insertions == 1);

  CHECK(AlignWords({}, {}).Wer() == 0.0);
  CHECK(AlignWords(Words("a b"), Words("a b")).Errors() == 0);

  EditCounts sum = AlignWords(Words("a b"), Words("a"));
  sum += AlignWords(Words("c d"), Words("c x"));
  CHECK(sum.reference_words == 4);
  CHECK(sum.Wer() == doctest::Approx(50.0));
}

TEST_CASE("nearest-rank percentile") {
  std::vector<double> v = {7, 1, 10, 3, 2, 9, 4, 8, 6, 5};
  CHECK(NearestRankPercentile(v, 50.0) == 5.0);
  CHECK(NearestRankPercentile(v, 95.0) == 10.0);
  CHECK(NearestRankPercentile(v, 10.0) == 1.0);
  CHECK(NearestRankPercentile(v, 11.0) == 2.0);
  CHECK(NearestRankPercentile(v, 100.0) == 10.0);
  CHECK(NearestRankPercentile({4.0}, 50.0) == 4.0);
  CHECK_THROWS_AS(NearestRankPercentile({}, 50.0), DataError);
  CHECK_THROWS_AS(NearestRankPercentile(v, 0.0), DataError);
}

TEST_CASE("desk configuration parsing") {
  DeskConfig def = DeskConfig::FromJson(nlohmann::json::object(), "/base");
  CHECK(def.max_prons == 5);
  CHECK(def.Resolve("x.txt") == fs::path("/base/x.txt"));
  CHECK(def.Resolve("/abs/x.txt") == fs::path("/abs/x.txt"));

  DeskConfig c = DeskConfig::FromJson(
      nlohmann::json::parse(R"({"max_prons": 3, "decode": {"beam": 7.5},
        "precompose": {"method": "bfs", "bfs_depth": 4},
        "bench": {"methods": ["none", "warmup"], "session_length": 5}})"),
      "/base");
  CHECK(c.max_prons == 3);
  CHECK(c.decode.beam == 7.5);
  CHECK(c.precompose.method == PrecomposeMethod::kBfs);
  CHECK(c.precompose.bfs_depth == 4);
  REQUIRE(c.bench.methods.size() == 2);
  CHECK(c.bench.methods[1] == PrecomposeMethod::kWarmup);
  CHECK(c.bench.session_length == 5);

  DeskConfig again = DeskConfig::FromJson(c.ToJson(), "/base");
  CHECK(again.ToJson() == c.ToJson());

  auto bad = [](const char *text) {
    return DeskConfig::FromJson(nlohmann::json::parse(text), "/base");
  };
  CHECK_THROWS_AS(bad(R"({"lexicons": "x"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"max_prons": "many"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"max_prons": 0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"precompose": {"method": "magic"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"bench": {"threads": 0}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"bench": {"methods": []}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"simulation": {"noise": -1}})"), ConfigError);
  CHECK_THROWS_AS(bad("[1, 2]"), ConfigError);

  CHECK_THROWS_AS(DeskConfig::Load("/nonexistent/desk.json"), DataError);
  fs::path tmp = fs::temp_directory_path() / "pcfst-test-bad.json";
  { std::ofstream(tmp) << "{ not json"; }
  CHECK_THROWS_AS(DeskConfig::Load(tmp), DataError);
  fs::remove(tmp);
}

TEST_CASE("utterance lines round trip") {
  std::vector<Utterance> utts = {{"u1", "alice", {"call", "bob"}, {"k", "a", "l"}},
                                 {"u2", "carol", {}, {"SIL"}}};
  std::stringstream ss;
  WriteUtterances(utts, ss);
  std::vector<Utterance> back = ReadUtterances(ss);
  REQUIRE(back.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(back[i].id == utts[i].id);
    CHECK(back[i].user == utts[i].user);
    CHECK(back[i].words == utts[i].words);
    CHECK(back[i].phones == utts[i].phones);
  }
  std::istringstream dup(R"({"id":"a","user":"x","words":"w","phones":"p"}
{"id":"a","user":"x","words":"w","phones":"p"}
)");
  CHECK_THROWS_AS(ReadUtterances(dup), ParseError);
  std::istringstream missing(R"({"id":"a","user":"x","words":"w"})");
  CHECK_THROWS_AS(ReadUtterances(missing), ParseError);
  std::istringstream empty_phones(R"({"id":"a","user":"x","words":"w","phones":""})");
  CHECK_THROWS_AS(ReadUtterances(empty_phones), ParseError);
  std::istringstream garbage("{oops\n");
  CHECK_THROWS_AS(ReadUtterances(garbage), ParseError);
}

TEST_CASE("segmentation counting") {
  std::vector<std::vector<std::string>> prons = {{"a"}, {"b"}, {"a", "b"}};
  CHECK(CountSegmentations({"a", "b"}, prons) == 2);
  CHECK(CountSegmentations({"b", "a"}, prons) == 1);
  CHECK(CountSegmentations({"c"}, prons) == 0);
  CHECK(CountSegmentations({"a", "b", "a", "b"}, prons) == 2);
  CHECK(CountSegmentations({}, prons) == 1);
}

TEST_CASE("desk data generation is deterministic and consistent") {
  DeskDataConfig config;
  config.num_users = 3;
  config.utterances_per_user = 5;
  config.warmup_utterances = 20;
  config.corpus_sentences = 100;
  DeskData a = GenerateDeskData(config);
  DeskData b = GenerateDeskData(config);
  std::stringstream sa, sb;
  WriteUtterances(a.test, sa);
  WriteUtterances(a.warmup, sa);
  WriteUtterances(b.test, sb);
  WriteUtterances(b.warmup, sb);
  CHECK(sa.str() == sb.str());
  CHECK(a.corpus == b.corpus);
  CHECK(a.test.size() == 15);
  CHECK(a.warmup.size() == 20);

  std::set<std::string> users, ids;
  for (const Contact &c : a.contacts) users.insert(c.user);
  CHECK(users.size() == 3);
  for (const Utterance &u : a.test) {
    CHECK(users.count(u.user) == 1);
    CHECK(ids.insert(u.id).second);
    CHECK(!u.phones.empty());
  }
  for (const auto &[user, list] : GroupContactsByUser(a.contacts))
    CHECK(list.size() == static_cast<size_t>(config.contacts_per_user));

  config.seed += 1;
  DeskData c = GenerateDeskData(config);
  std::stringstream sc;
  WriteUtterances(c.test, sc);
  WriteUtterances(c.warmup, sc);
  CHECK(sc.str() != sa.str());

  config.contacts_per_user = 2;
  CHECK_THROWS_AS(GenerateDeskData(config), ConfigError);
}

TEST_CASE("graph artifacts round trip") {
  const DeskGraph &g = Desk();
  fs::path dir = fs::temp_directory_path() / "pcfst-test-artifacts";
  fs::remove_all(dir);
  WriteDeskGraph(g, dir);
  DeskGraph back = ReadDeskGraph(dir);
  CHECK(WriteTextFst(back.graph->t1()) == WriteTextFst(g.graph->t1()));
  CHECK(WriteTextFst(back.graph->root()) == WriteTextFst(g.graph->root()));
  CHECK(back.classes.Labels() == g.classes.Labels());
  REQUIRE(back.contact_fsts.size() == g.contact_fsts.size());
  for (const auto &[user, fst] : g.contact_fsts)
    CHECK(WriteTextFst(*back.contact_fsts.at(user)) == WriteTextFst(*fst));
  fs::remove_all(dir);
  CHECK_THROWS_AS(ReadDeskGraph(dir), DataError);
  CHECK_THROWS_AS(g.BindingFor("nobody"), DataError);
}

TEST_CASE("configuration runs are independent of the thread count") {
  const DeskGraph &g = Desk();
  DeskConfig config = DeskConfig::Load(fs::path(PCFST_DESK_DIR) / "desk.json");
  std::vector<Utterance> utts = DeskUtterances(24);
  auto cache = EmptyPublicCache(g.graph);
  BenchPlan plan = config.bench;
  plan.session_length = 2;
  plan.threads = 1;
  ConfigurationResult one =
      RunConfiguration("none", g, cache, utts, plan, config.decode, config.simulation);
  plan.threads = 3;
  ConfigurationResult three =
      RunConfiguration("none", g, cache, utts, plan, config.decode, config.simulation);
  REQUIRE(one.utterances.size() == utts.size());
  REQUIRE(three.utterances.size() == utts.size());
  for (size_t i = 0; i < utts.size(); ++i) {
    const UtteranceResult &a = one.utterances[i];
    const UtteranceResult &b = three.utterances[i];
    CHECK(a.id == utts[i].id);
    CHECK(a.words == b.words);
    CHECK(a.cost == b.cost);
    CHECK(a.turn == b.turn);
    CHECK(a.turn >= 1);
    CHECK(a.turn <= 2);
    CHECK(a.metrics.otf_expansions == b.metrics.otf_expansions);
    CHECK(a.error.empty());
  }
  CHECK(one.otf_expansions == three.otf_expansions);
  CHECK(one.edits.Errors() == three.edits.Errors());
  CHECK(one.session_private_bytes == three.session_private_bytes);
  CHECK(one.ToJson(false, 10) == three.ToJson(false, 10));

  plan.threads = 1;
  plan.requests_per_thread = 5;
  ConfigurationResult limited =
      RunConfiguration("none", g, cache, utts, plan, config.decode, config.simulation);
  CHECK(limited.utterances.size() == 5);
}

TEST_CASE("report scoring") {
  const DeskGraph &g = Desk();
  DeskConfig config = DeskConfig::Load(fs::path(PCFST_DESK_DIR) / "desk.json");
  std::vector<Utterance> utts = DeskUtterances(6);
  BenchReport report;
  report.configurations.push_back(RunConfiguration("none", g, EmptyPublicCache(g.graph), utts,
                                                   config.bench, config.decode,
                                                   config.simulation));
  nlohmann::json j = report.ToJson(false);
  std::vector<ScoreRow> rows = ScoreReport(j, utts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].configuration == "none");
  CHECK(rows[0].edits.Errors() == report.configurations[0].edits.Errors());
  CHECK(rows[0].edits.reference_words == report.configurations[0].edits.reference_words);

  std::vector<Utterance> fewer(utts.begin(), utts.end() - 1);
  CHECK_THROWS_AS(ScoreReport(j, fewer), DataError);
  std::vector<Utterance> more = utts;
  more.push_back({"extra", utts[0].user, {"x"}, {"p"}});
  CHECK_THROWS_AS(ScoreReport(j, more), DataError);
  CHECK_THROWS_AS(ScoreReport(nlohmann::json::object(), utts), DataError);
}
