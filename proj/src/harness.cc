// pcfst/harness.cc

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

#include "pcfst/harness.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pcfst/errors.h"
#include "pcfst/fst-io.h"

namespace pcfst {

namespace fs = std::filesystem;

namespace {

std::ifstream OpenInput(const fs::path &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  return is;
}

std::ofstream OpenOutput(const fs::path &path) {
  std::ofstream os(path);
  if (!os) throw ResourceError("cannot write " + path.string());
  return os;
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string Join(const std::vector<std::string> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i];
  }
  return out;
}

std::vector<std::string> Split(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

nlohmann::json MetricsJson(const Metrics &m) {
  return {{"otf_expansions", m.otf_expansions},
          {"public_hits", m.public_hits},
          {"private_hits", m.private_hits},
          {"frames", m.frames}};
}

}  // namespace

void BenchPlan::Validate() const {
  if (methods.empty()) throw ConfigError("bench plan has no methods");
  if (session_length < 1) throw ConfigError("session_length must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (requests_per_thread < 0) throw ConfigError("requests_per_thread must be non-negative");
  if (concurrency < 2) throw ConfigError("concurrency must be at least 2");
}

void DeskConfig::Validate() const {
  if (max_prons < 1) throw ConfigError("max_prons must be at least 1");
  decode.Validate();
  precompose.Validate();
  bench.Validate();
  if (simulation.frames_per_phone < 1) throw ConfigError("frames_per_phone must be at least 1");
  if (simulation.margin < 0.0 || simulation.noise < 0.0)
    throw ConfigError("margin and noise must be non-negative");
}

fs::path DeskConfig::Resolve(const std::string &relative) const {
  fs::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

DeskConfig DeskConfig::FromJson(const nlohmann::json &j, const fs::path &base_dir) {
  static const std::set<std::string> kKeys = {
      "lexicon", "phones",   "corpus",     "classes",    "contacts", "utterances",
      "warmup",  "work_dir", "max_prons",  "decode",     "simulation", "precompose",
      "bench"};
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto &[key, value] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  DeskConfig c;
  c.base_dir = base_dir;
  try {
    c.lexicon = j.value("lexicon", c.lexicon);
    c.phones = j.value("phones", c.phones);
    c.corpus = j.value("corpus", c.corpus);
    c.classes = j.value("classes", c.classes);
    c.contacts = j.value("contacts", c.contacts);
    c.utterances = j.value("utterances", c.utterances);
    c.warmup = j.value("warmup", c.warmup);
    c.work_dir = j.value("work_dir", c.work_dir);
    c.max_prons = j.value("max_prons", c.max_prons);
    if (j.contains("decode")) {
      const auto &d = j["decode"];
      c.decode.beam = d.value("beam", c.decode.beam);
      c.decode.max_active = d.value("max_active", c.decode.max_active);
      c.decode.max_closure_pops = d.value("max_closure_pops", c.decode.max_closure_pops);
    }
    if (j.contains("simulation")) {
      const auto &s = j["simulation"];
      c.simulation.frames_per_phone = s.value("frames_per_phone", c.simulation.frames_per_phone);
      c.simulation.margin = s.value("margin", c.simulation.margin);
      c.simulation.noise = s.value("noise", c.simulation.noise);
      c.simulation.seed = s.value("seed", c.simulation.seed);
    }
    if (j.contains("precompose")) {
      const auto &p = j["precompose"];
      c.precompose.method = ParseMethod(p.value("method", std::string(MethodName(c.precompose.method))));
      c.precompose.bfs_depth = p.value("bfs_depth", c.precompose.bfs_depth);
      c.precompose.state_budget = p.value("state_budget", c.precompose.state_budget);
    }
    if (j.contains("bench")) {
      const auto &b = j["bench"];
      if (b.contains("methods")) {
        c.bench.methods.clear();
        for (const auto &m : b["methods"]) c.bench.methods.push_back(ParseMethod(m.get<std::string>()));
      }
      c.bench.session_length = b.value("session_length", c.bench.session_length);
      c.bench.threads = b.value("threads", c.bench.threads);
      c.bench.requests_per_thread = b.value("requests_per_thread", c.bench.requests_per_thread);
      c.bench.concurrency = b.value("concurrency", c.bench.concurrency);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
  c.Validate();
  return c;
}

DeskConfig DeskConfig::Load(const fs::path &path) {
  std::ifstream is = OpenInput(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return FromJson(j, path.parent_path());
}

nlohmann::json DeskConfig::ToJson() const {
  nlohmann::json methods = nlohmann::json::array();
  for (PrecomposeMethod m : bench.methods) methods.push_back(MethodName(m));
  return {
      {"lexicon", lexicon},
      {"phones", phones},
      {"corpus", corpus},
      {"classes", classes},
      {"contacts", contacts},
      {"utterances", utterances},
      {"warmup", warmup},
      {"work_dir", work_dir},
      {"max_prons", max_prons},
      {"decode", {{"beam", decode.beam}, {"max_active", decode.max_active},
                  {"max_closure_pops", decode.max_closure_pops}}},
      {"simulation", {{"frames_per_phone", simulation.frames_per_phone},
                      {"margin", simulation.margin},
                      {"noise", simulation.noise},
                      {"seed", simulation.seed}}},
      {"precompose", {{"method", MethodName(precompose.method)},
                      {"bfs_depth", precompose.bfs_depth},
                      {"state_budget", precompose.state_budget}}},
      {"bench", {{"methods", methods},
                 {"session_length", bench.session_length},
                 {"threads", bench.threads},
                 {"requests_per_thread", bench.requests_per_thread},
                 {"concurrency", bench.concurrency}}},
  };
}

ClassBinding DeskGraph::BindingFor(const std::string &user) const {
  auto it = contact_fsts.find(user);
  if (it == contact_fsts.end()) throw DataError("no contact list for user '" + user + "'");
  return ClassBinding::Uniform(classes, it->second);
}

std::vector<std::string> DeskGraph::Words(const std::vector<Label> &labels) const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(syms.words->Symbol(l));
  return out;
}

DeskGraph BuildDeskGraph(const DeskConfig &config) {
  std::ifstream lex_in = OpenInput(config.Resolve(config.lexicon));
  Lexicon lexicon = Lexicon::Read(lex_in);
  if (!config.phones.empty()) {
    std::ifstream ph_in = OpenInput(config.Resolve(config.phones));
    std::set<std::string> inventory;
    std::string p;
    while (ph_in >> p) inventory.insert(p);
    inventory.insert(kSilencePhone);
    lexicon.phones.assign(inventory.begin(), inventory.end());
    lexicon.monophone_words = lexicon.phones;
  }
  lexicon.Validate();
  std::ifstream cls_in = OpenInput(config.Resolve(config.classes));
  std::vector<std::string> class_names = ReadClassNames(cls_in);
  std::ifstream corpus_in = OpenInput(config.Resolve(config.corpus));
  Corpus corpus = ReadCorpus(corpus_in);
  std::ifstream contacts_in = OpenInput(config.Resolve(config.contacts));
  ContactList contacts = ReadContacts(contacts_in);

  DeskGraph g;
  g.syms = MakeGraphSymbols(lexicon, class_names);
  g.classes = ResolveClasses(class_names, *g.syms.words);
  auto t1 = std::make_shared<const Fst>(BuildLexiconFst(lexicon, g.syms));
  auto root = std::make_shared<const Fst>(TrainBigramRoot(corpus, g.classes, g.syms.words));
  g.graph = std::make_shared<const RecognitionGraph>(t1, root, g.classes);
  for (const auto &[user, list] : GroupContactsByUser(contacts))
    g.contact_fsts[user] = std::make_shared<const Fst>(BuildContactFst(list, g.syms.words, config.max_prons));
  return g;
}

void WriteDeskGraph(const DeskGraph &g, const fs::path &dir) {
  fs::create_directories(dir / "contacts");
  WriteSymbolTableFile(*g.syms.phones, (dir / "phones.syms").string());
  WriteSymbolTableFile(*g.syms.words, (dir / "words.syms").string());
  WriteTextFstFile(g.graph->t1(), (dir / "t1.fst").string());
  WriteTextFstFile(g.graph->root(), (dir / "root.fst").string());
  {
    std::ofstream os = OpenOutput(dir / "classes.txt");
    for (Label l : g.classes.Labels()) os << g.syms.words->Symbol(l) << '\n';
  }
  std::ofstream users = OpenOutput(dir / "users.txt");
  for (const auto &[user, fst] : g.contact_fsts) {
    users << user << '\n';
    WriteTextFstFile(*fst, (dir / "contacts" / (user + ".fst")).string());
  }
}

DeskGraph ReadDeskGraph(const fs::path &dir) {
  if (!fs::exists(dir / "t1.fst"))
    throw DataError("no graph artifacts in " + dir.string() + " (run 'pcfst build' first)");
  DeskGraph g;
  g.syms.phones = std::make_shared<SymbolTable>(ReadSymbolTableFile((dir / "phones.syms").string()));
  g.syms.words = std::make_shared<SymbolTable>(ReadSymbolTableFile((dir / "words.syms").string()));
  std::ifstream cls_in = OpenInput(dir / "classes.txt");
  g.classes = ResolveClasses(ReadClassNames(cls_in), *g.syms.words);
  auto t1 = std::make_shared<const Fst>(
      ReadTextFstFile((dir / "t1.fst").string(), g.syms.phones, g.syms.words));
  auto root = std::make_shared<const Fst>(
      ReadTextFstFile((dir / "root.fst").string(), g.syms.words, g.syms.words));
  g.graph = std::make_shared<const RecognitionGraph>(t1, root, g.classes);
  std::ifstream users = OpenInput(dir / "users.txt");
  std::string user;
  while (users >> user)
    g.contact_fsts[user] = std::make_shared<const Fst>(ReadTextFstFile(
        (dir / "contacts" / (user + ".fst")).string(), g.syms.words, g.syms.words));
  return g;
}

std::vector<Utterance> LoadUtterances(const fs::path &path) {
  std::ifstream is = OpenInput(path);
  try {
    return ReadUtterances(is);
  } catch (const ParseError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ScoreMatrix UtteranceScores(const Utterance &utt, const SymbolTable &phones,
                            const SimulationConfig &simulation, size_t index) {
  SimulationConfig sim = simulation;
  sim.seed = SplitMix64(simulation.seed ^ SplitMix64(index));
  try {
    return SimulateScores(utt.phones, phones, sim);
  } catch (const DataError &e) {
    throw DataError("utterance " + utt.id + ": " + e.what());
  }
}

std::shared_ptr<const PublicCache> BuildPublicCache(const DeskGraph &graph,
                                                    const PrecomposeConfig &config,
                                                    const std::vector<Utterance> &warmup,
                                                    const DecodeConfig &decode,
                                                    const SimulationConfig &simulation,
                                                    PrecomposeStats *stats) {
  std::vector<ScoreMatrix> scores;
  if (config.method == PrecomposeMethod::kWarmup || config.method == PrecomposeMethod::kBoth) {
    scores.reserve(warmup.size());
    for (size_t i = 0; i < warmup.size(); ++i)
      scores.push_back(UtteranceScores(warmup[i], *graph.syms.phones, simulation, i));
  }
  return Precompose(graph.graph, config, scores, decode, stats);
}

ConfigurationResult RunConfiguration(const std::string &name, const DeskGraph &graph,
                                     std::shared_ptr<const PublicCache> cache,
                                     const std::vector<Utterance> &utts, const BenchPlan &plan,
                                     const DecodeConfig &decode,
                                     const SimulationConfig &simulation) {
  plan.Validate();
  ConfigurationResult result;
  result.name = name;
  result.public_states = cache->NumStates();
  result.public_expanded = cache->NumExpanded();
  result.public_arcs = cache->NumArcs();
  result.bytes_public = cache->ModeledBytes();

  // Sessions: consecutive turns of one user, at most session_length each.
  std::vector<std::vector<size_t>> sessions;
  std::map<std::string, size_t> open;
  for (size_t i = 0; i < utts.size(); ++i) {
    auto it = open.find(utts[i].user);
    if (it == open.end() || sessions[it->second].size() == static_cast<size_t>(plan.session_length)) {
      open[utts[i].user] = sessions.size();
      sessions.push_back({});
    }
    sessions[open[utts[i].user]].push_back(i);
  }

  std::vector<UtteranceResult> results(utts.size());
  std::vector<char> processed(utts.size(), 0);
  std::vector<size_t> session_bytes(sessions.size(), 0);
  std::vector<std::exception_ptr> failures(plan.threads);
  std::atomic<int64_t> peak_live{0};

  auto worker = [&](int w) {
    try {
      int done = 0;
      for (size_t k = w; k < sessions.size(); k += plan.threads) {
        if (plan.requests_per_thread > 0 && done >= plan.requests_per_thread) break;
        const std::string &user = utts[sessions[k].front()].user;
        Session session(cache, graph.BindingFor(user), static_cast<int64_t>(k));
        for (size_t t = 0; t < sessions[k].size(); ++t) {
          if (plan.requests_per_thread > 0 && done >= plan.requests_per_thread) break;
          const size_t i = sessions[k][t];
          UtteranceResult &r = results[i];
          r.id = utts[i].id;
          r.user = user;
          r.session = static_cast<int>(k);
          r.turn = static_cast<int>(t) + 1;
          try {
            ScoreMatrix scores = UtteranceScores(utts[i], *graph.syms.phones, simulation, i);
            Hypothesis hyp = Decode(scores, &session, decode);
            r.found = hyp.found;
            r.words = graph.Words(hyp.words);
            r.cost = hyp.found ? hyp.cost.Value() : 0.0;
            r.metrics = hyp.metrics;
          } catch (const DataError &e) {
            r.error = e.what();
          } catch (const ResourceError &e) {
            r.error = e.what();
          }
          processed[i] = 1;
          ++done;
          int64_t live = cache->memory().Live();
          int64_t prev = peak_live.load();
          while (live > prev && !peak_live.compare_exchange_weak(prev, live)) {
          }
        }
        session_bytes[k] = session.PrivateBytes();
        session.End();
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < plan.threads; ++w) threads.emplace_back(worker, w);
  worker(0);
  for (std::thread &t : threads) t.join();
  for (const std::exception_ptr &f : failures)
    if (f) std::rethrow_exception(f);

  std::map<int, std::pair<double, int>> per_turn;
  std::vector<double> rtfs;
  for (size_t i = 0; i < utts.size(); ++i) {
    if (!processed[i]) continue;
    const UtteranceResult &r = results[i];
    result.utterances.push_back(r);
    if (!r.error.empty()) {
      ++result.errors;
      continue;
    }
    if (!r.found) ++result.no_hypothesis;
    result.edits += AlignWords(utts[i].words, r.words);
    result.otf_expansions += r.metrics.otf_expansions;
    result.public_hits += r.metrics.public_hits;
    result.private_hits += r.metrics.private_hits;
    per_turn[r.turn].first += static_cast<double>(r.metrics.otf_expansions);
    per_turn[r.turn].second += 1;
    if (r.metrics.frames > 0) {
      Hypothesis h;
      h.metrics = r.metrics;
      rtfs.push_back(Rtf(h));
    }
  }
  for (const auto &[turn, acc] : per_turn) result.mean_otf_per_turn.push_back(acc.first / acc.second);
  for (size_t k = 0; k < sessions.size(); ++k) result.session_private_bytes.push_back(session_bytes[k]);
  if (!sessions.empty()) {
    double sum = 0.0;
    for (size_t b : session_bytes) sum += static_cast<double>(b);
    result.marginal_bytes_per_session = sum / static_cast<double>(sessions.size());
  }
  if (!rtfs.empty()) {
    result.rtf_p50 = NearestRankPercentile(rtfs, 50.0);
    result.rtf_p95 = NearestRankPercentile(rtfs, 95.0);
  }
  result.peak_live_private_bytes = peak_live.load();
  return result;
}

nlohmann::json ConfigurationResult::ToJson(bool include_wall_time, int concurrency) const {
  nlohmann::json utt = nlohmann::json::array();
  for (const UtteranceResult &r : utterances) {
    nlohmann::json u = {{"id", r.id},
                        {"user", r.user},
                        {"session", r.session},
                        {"turn", r.turn},
                        {"found", r.found},
                        {"hypothesis", Join(r.words)},
                        {"cost", r.cost},
                        {"metrics", MetricsJson(r.metrics)}};
    if (!r.error.empty()) u["error"] = r.error;
    if (include_wall_time) u["wall_seconds"] = r.metrics.wall_seconds;
    utt.push_back(std::move(u));
  }
  nlohmann::json warmup_errors = nlohmann::json::array();
  for (const std::string &e : precompose.warmup_errors) warmup_errors.push_back(e);
  nlohmann::json pre = {{"bfs_expanded", precompose.bfs_expanded},
                        {"bfs_max_depth", precompose.bfs_max_depth},
                        {"warmup_utterances", precompose.warmup_utterances},
                        {"warmup_promoted", precompose.warmup_promoted},
                        {"warmup_discarded", precompose.warmup_discarded},
                        {"warmup_errors", warmup_errors},
                        {"budget_exhausted", precompose.budget_exhausted}};
  if (include_wall_time) pre["seconds"] = precompose.seconds;
  nlohmann::json summary = {
      {"utterances", utterances.size()},
      {"errors", errors},
      {"no_hypothesis", no_hypothesis},
      {"wer", edits.Wer()},
      {"substitutions", edits.substitutions},
      {"insertions", edits.insertions},
      {"deletions", edits.deletions},
      {"reference_words", edits.reference_words},
      {"otf_expansions", otf_expansions},
      {"public_hits", public_hits},
      {"private_hits", private_hits},
      {"mean_otf_per_turn", mean_otf_per_turn},
      {"marginal_bytes_per_session", marginal_bytes_per_session},
      {"modeled_bytes_at_concurrency",
       static_cast<double>(bytes_public) + concurrency * marginal_bytes_per_session},
  };
  if (include_wall_time) {
    summary["rtf_p50"] = rtf_p50;
    summary["rtf_p95"] = rtf_p95;
    summary["peak_live_private_bytes"] = peak_live_private_bytes;
  }
  return {{"name", name},
          {"precompose", pre},
          {"public", {{"states", public_states},
                      {"expanded", public_expanded},
                      {"arcs", public_arcs},
                      {"bytes", bytes_public}}},
          {"summary", summary},
          {"session_private_bytes", session_private_bytes},
          {"utterances", utt}};
}

nlohmann::json BenchReport::ToJson(bool include_wall_time) const {
  nlohmann::json configs = nlohmann::json::array();
  for (const ConfigurationResult &c : configurations)
    configs.push_back(c.ToJson(include_wall_time, concurrency));

  nlohmann::json comparisons = nlohmann::json::object();
  const ConfigurationResult *cold = nullptr;
  for (const ConfigurationResult &c : configurations)
    if (c.name == "none") cold = &c;
  if (cold != nullptr) {
    bool identical = true;
    for (const ConfigurationResult &c : configurations) {
      if (c.utterances.size() != cold->utterances.size()) {
        identical = false;
        continue;
      }
      for (size_t i = 0; i < c.utterances.size(); ++i)
        if (c.utterances[i].words != cold->utterances[i].words) identical = false;
    }
    comparisons["hypotheses_identical"] = identical;
    nlohmann::json ratios = nlohmann::json::object();
    for (const ConfigurationResult &c : configurations) {
      if (&c == cold) continue;
      ratios[c.name] = c.otf_expansions == 0
                           ? nlohmann::json(nullptr)
                           : nlohmann::json(static_cast<double>(cold->otf_expansions) /
                                            static_cast<double>(c.otf_expansions));
    }
    comparisons["otf_expansion_ratio_vs_none"] = ratios;
  }
  return {{"config", config},
          {"concurrency", concurrency},
          {"configurations", configs},
          {"comparisons", comparisons},
          {"production_scale_reference",
           {{"bfs_depth5_states", 1035374},
            {"warmup_states", 19356186},
            {"marginal_memory_ratio_dynamic_vs_precomposed", 1.5}}}};
}

BenchReport RunBench(const DeskConfig &config, const DeskGraph &graph) {
  config.Validate();
  std::vector<Utterance> utts = LoadUtterances(config.Resolve(config.utterances));
  std::vector<Utterance> warmup;
  for (PrecomposeMethod m : config.bench.methods)
    if (m == PrecomposeMethod::kWarmup || m == PrecomposeMethod::kBoth) {
      warmup = LoadUtterances(config.Resolve(config.warmup));
      break;
    }
  BenchReport report;
  report.config = config.ToJson();
  report.concurrency = config.bench.concurrency;
  for (PrecomposeMethod m : config.bench.methods) {
    PrecomposeConfig pc = config.precompose;
    pc.method = m;
    PrecomposeStats stats;
    std::shared_ptr<const PublicCache> cache =
        BuildPublicCache(graph, pc, warmup, config.decode, config.simulation, &stats);
    ConfigurationResult r = RunConfiguration(MethodName(m), graph, cache, utts, config.bench,
                                             config.decode, config.simulation);
    r.precompose = stats;
    report.configurations.push_back(std::move(r));
  }
  return report;
}

std::vector<ScoreRow> ScoreReport(const nlohmann::json &report,
                                  const std::vector<Utterance> &references) {
  std::map<std::string, const Utterance *> refs;
  for (const Utterance &u : references) refs[u.id] = &u;
  std::vector<ScoreRow> rows;
  try {
    for (const auto &config : report.at("configurations")) {
      ScoreRow row;
      row.configuration = config.at("name").get<std::string>();
      std::set<std::string> seen;
      std::vector<std::string> unknown;
      for (const auto &u : config.at("utterances")) {
        std::string id = u.at("id").get<std::string>();
        auto it = refs.find(id);
        if (it == refs.end()) {
          unknown.push_back(id);
          continue;
        }
        seen.insert(id);
        row.edits += AlignWords(it->second->words, Split(u.at("hypothesis").get<std::string>()));
      }
      std::vector<std::string> missing;
      for (const auto &[id, u] : refs)
        if (!seen.count(id)) missing.push_back(id);
      if (!unknown.empty() || !missing.empty()) {
        std::string msg = "configuration '" + row.configuration + "': id mismatch;";
        if (!missing.empty()) msg += " missing hypotheses for: " + Join(missing) + ";";
        if (!unknown.empty()) msg += " no reference for: " + Join(unknown) + ";";
        throw DataError(msg);
      }
      rows.push_back(row);
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return rows;
}

}  // namespace pcfst
