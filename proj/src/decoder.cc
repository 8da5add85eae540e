// pcfst/decoder.cc

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

#include "pcfst/decoder.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>

#include "pcfst/errors.h"

namespace pcfst {

void DecodeConfig::Validate() const {
  if (!(beam > 0.0)) throw ConfigError("beam must be positive");
  if (max_active < 1) throw ConfigError("max_active must be at least 1");
  if (max_closure_pops < 1) throw ConfigError("max_closure_pops must be at least 1");
}

double Rtf(const Hypothesis &hyp) {
  if (hyp.metrics.frames == 0) throw DataError("RTF of a hypothesis without frames");
  return hyp.metrics.wall_seconds / (hyp.metrics.frames * ScoreMatrix::kFrameSeconds);
}

namespace {

struct Token {
  StateId id;
  ComposedStateKey key;
  double cost;
  int trace;  // index into the word trace, -1 for none
  const Expansion *expansion;
};

struct TraceLink {
  int parent;
  Label word;
};

// Orders by (cost, key); used for pruning and final selection.
bool Better(double cost_a, const ComposedStateKey &a, double cost_b,
            const ComposedStateKey &b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  return a < b;
}

class FrameDecoder {
 public:
  FrameDecoder(const ScoreMatrix &scores, Session *session, const DecodeConfig &config)
      : scores_(scores), session_(session), config_(config) {}

  Hypothesis Run();

 private:
  // Relaxes `id` in the current token set. Returns the token index if the
  // cost improved, -1 otherwise.
  int Relax(StateId id, double cost, int trace);
  void Closure();
  void Prune();
  void ProcessEmitting(int frame);
  int Link(int parent, Label olabel) {
    if (olabel == kEpsilon) return parent;
    trace_.push_back({parent, olabel});
    return static_cast<int>(trace_.size()) - 1;
  }

  const ScoreMatrix &scores_;
  Session *session_;
  const DecodeConfig &config_;
  std::vector<Token> tokens_;
  std::unordered_map<StateId, int> index_;
  std::vector<TraceLink> trace_;
};

int FrameDecoder::Relax(StateId id, double cost, int trace) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    index_.emplace(id, static_cast<int>(tokens_.size()));
    tokens_.push_back({id, session_->Key(id), cost, trace, nullptr});
    return static_cast<int>(tokens_.size()) - 1;
  }
  Token &tok = tokens_[it->second];
  if (cost < tok.cost) {
    tok.cost = cost;
    tok.trace = trace;
    return it->second;
  }
  return -1;
}

void FrameDecoder::Closure() {
  struct Entry {
    double cost;
    ComposedStateKey key;
    int index;
    bool operator>(const Entry &o) const {
      if (cost != o.cost) return cost > o.cost;
      return o.key < key;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  for (size_t i = 0; i < tokens_.size(); ++i)
    queue.push({tokens_[i].cost, tokens_[i].key, static_cast<int>(i)});
  size_t pops = 0;
  while (!queue.empty()) {
    Entry e = queue.top();
    queue.pop();
    if (e.cost != tokens_[e.index].cost) continue;  // stale
    if (++pops > config_.max_closure_pops)
      throw ResourceError("epsilon closure exceeded " +
                          std::to_string(config_.max_closure_pops) + " pops");
    if (tokens_[e.index].expansion == nullptr)
      tokens_[e.index].expansion = &session_->Expand(tokens_[e.index].id);
    const Token src = tokens_[e.index];
    for (const CachedArc &arc : src.expansion->arcs) {
      if (arc.ilabel != kEpsilon) continue;
      double cost = src.cost + arc.weight.Value();
      int j = Relax(arc.nextstate, cost, Link(src.trace, arc.olabel));
      if (j >= 0) queue.push({cost, tokens_[j].key, j});
    }
  }
}

void FrameDecoder::Prune() {
  if (tokens_.empty()) return;
  double best = tokens_.front().cost;
  for (const Token &t : tokens_) best = std::min(best, t.cost);
  const double limit = best + config_.beam;
  std::vector<Token> kept;
  kept.reserve(tokens_.size());
  for (const Token &t : tokens_)
    if (t.cost <= limit) kept.push_back(t);
  auto better = [](const Token &a, const Token &b) {
    return Better(a.cost, a.key, b.cost, b.key);
  };
  if (kept.size() > static_cast<size_t>(config_.max_active)) {
    std::nth_element(kept.begin(), kept.begin() + config_.max_active, kept.end(), better);
    kept.resize(config_.max_active);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Token &a, const Token &b) { return a.key < b.key; });
  tokens_ = std::move(kept);
}

void FrameDecoder::ProcessEmitting(int frame) {
  std::vector<Token> prev = std::move(tokens_);
  tokens_.clear();
  index_.clear();
  for (const Token &src : prev) {
    for (const CachedArc &arc : src.expansion->arcs) {
      if (arc.ilabel == kEpsilon) continue;
      double acoustic = scores_.Cost(frame, arc.ilabel);
      if (std::isinf(acoustic)) continue;
      double cost = src.cost + (arc.weight.Value() + acoustic);
      if (std::isinf(cost)) continue;
      Relax(arc.nextstate, cost, Link(src.trace, arc.olabel));
    }
  }
}

Hypothesis FrameDecoder::Run() {
  auto t0 = std::chrono::steady_clock::now();
  const Metrics before = session_->metrics();
  Relax(session_->Start(), 0.0, -1);
  Closure();
  Prune();
  for (int t = 0; t < scores_.NumFrames() && !tokens_.empty(); ++t) {
    ProcessEmitting(t);
    Closure();
    Prune();
  }

  Hypothesis hyp;
  const Token *best = nullptr;
  double best_cost = 0.0;
  for (const Token &tok : tokens_) {
    Weight final = tok.expansion->final;
    if (final.IsZero()) continue;
    double total = tok.cost + final.Value();
    if (best == nullptr || Better(total, tok.key, best_cost, best->key)) {
      best = &tok;
      best_cost = total;
    }
  }
  if (best != nullptr) {
    hyp.found = true;
    hyp.cost = Weight(best_cost);
    for (int i = best->trace; i >= 0; i = trace_[i].parent) hyp.words.push_back(trace_[i].word);
    std::reverse(hyp.words.begin(), hyp.words.end());
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  session_->RecordDecode(scores_.NumFrames(), seconds);
  hyp.metrics = session_->metrics().Since(before);
  return hyp;
}

}  // namespace

Hypothesis Decode(const ScoreMatrix &scores, Session *session, const DecodeConfig &config) {
  config.Validate();
  if (session == nullptr) throw ConfigError("Decode: null session");
  FrameDecoder decoder(scores, session, config);
  return decoder.Run();
}

}  // namespace pcfst
