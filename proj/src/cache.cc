// pcfst/cache.cc

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

#include "pcfst/cache.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "pcfst/errors.h"

namespace pcfst {

namespace {

const char kDumpMagic[] = "pcfst-public-cache";
const int kDumpVersion = 1;

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string KeyToString(const ComposedStateKey &key) {
  std::ostringstream os;
  os << "(" << key.q1 << ", ";
  if (key.q2.IsRoot())
    os << "ROOT(" << key.q2.root << ")";
  else
    os << "INSIDE(" << key.q2.cls << ", " << key.q2.inner << ", " << key.q2.root << ")";
  os << ", f" << static_cast<int>(key.filter) << ")";
  return os.str();
}

RecognitionGraph::RecognitionGraph(std::shared_ptr<const Fst> t1,
                                   std::shared_ptr<const Fst> root,
                                   ClassLabelSet classes)
    : t1_(std::move(t1)), root_(std::move(root)), classes_(std::move(classes)) {
  if (!t1_ || !root_) throw DataError("recognition graph needs T1 and a root FST");
  class_state_.resize(root_->NumStates());
  for (StateId q = 0; q < root_->NumStates(); ++q)
    class_state_[q] = HasClassArc(*root_, classes_, q);
}

ComposedStateKey RecognitionGraph::StartKey() const {
  return {t1_->Start(), ReplaceState::Root(root_->Start()), FilterState::kAny};
}

bool RecognitionGraph::IsValidKey(const ComposedStateKey &key) const {
  if (key.q1 < 0 || key.q1 >= t1_->NumStates()) return false;
  if (key.q2.root < 0 || key.q2.root >= root_->NumStates()) return false;
  if (key.filter == FilterState::kBlocked) return false;
  if (key.q2.IsRoot()) return key.q2.inner == 0;
  return classes_.Contains(key.q2.cls) && key.q2.inner >= 0;
}

PublicCache::PublicCache(std::shared_ptr<const RecognitionGraph> graph)
    : graph_(std::move(graph)) {
  if (!graph_) throw DataError("public cache needs a recognition graph");
}

void PublicCache::RequireUnsealed(const char *what) const {
  if (sealed_)
    throw ConfigError(std::string("public cache is sealed; cannot ") + what);
}

StateId PublicCache::Intern(const ComposedStateKey &key) {
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  RequireUnsealed("intern new states");
  StateId id = NumStates();
  ids_.emplace(key, id);
  keys_.push_back(key);
  expansions_.emplace_back();
  has_expansion_.push_back(false);
  return id;
}

void PublicCache::Store(StateId id, Expansion expansion) {
  RequireUnsealed("store expansions");
  if (id < 0 || id >= NumStates())
    throw InvariantError("public store to unknown id " + std::to_string(id));
  if (has_expansion_[id]) {
    num_arcs_ -= expansions_[id].arcs.size();
  } else {
    ++num_expanded_;
  }
  num_arcs_ += expansion.arcs.size();
  expansions_[id] = std::move(expansion);
  has_expansion_[id] = true;
}

void PublicCache::Seal() {
  if (sealed_) return;
  for (StateId id = 0; id < NumStates(); ++id) {
    const ComposedStateKey &key = keys_[id];
    if (!key.q2.IsRoot())
      throw InvariantError("public cache holds personalized state " + KeyToString(key));
    if (!has_expansion_[id]) continue;
    if (!graph_->IsPrecomposable(key.q2))
      throw InvariantError("public cache expanded non-precomposable state " +
                           KeyToString(key));
    for (const CachedArc &arc : expansions_[id].arcs)
      if (arc.nextstate < 0 || arc.nextstate >= NumStates())
        throw InvariantError("public arc of " + KeyToString(key) +
                             " leaves the public segment");
  }
  sealed_ = true;
  sealed_checksum_ = Checksum();
}

StateId PublicCache::Find(const ComposedStateKey &key) const {
  auto it = ids_.find(key);
  return it == ids_.end() ? kNoStateId : it->second;
}

size_t PublicCache::ModeledBytes() const {
  return num_arcs_ * kModelArcBytes + num_expanded_ * kModelStateBytes +
         keys_.size() * kModelKeyBytes;
}

void PublicCache::WriteBody(std::ostream &os) const {
  os << kDumpMagic << ' ' << kDumpVersion << '\n';
  os << "states " << NumStates() << " expanded " << num_expanded_ << '\n';
  for (StateId id = 0; id < NumStates(); ++id) {
    const ComposedStateKey &k = keys_[id];
    os << "k " << id << ' ' << k.q1 << ' ' << k.q2.root << ' ' << k.q2.cls << ' '
       << k.q2.inner << ' ' << static_cast<int>(k.filter) << '\n';
  }
  for (StateId id = 0; id < NumStates(); ++id) {
    if (!has_expansion_[id]) continue;
    const Expansion &e = expansions_[id];
    os << "e " << id << ' ' << FormatWeight(e.final) << ' ' << e.arcs.size() << '\n';
    for (const CachedArc &a : e.arcs)
      os << "a " << a.ilabel << ' ' << a.olabel << ' ' << FormatWeight(a.weight) << ' '
         << a.nextstate << '\n';
  }
}

uint64_t PublicCache::Checksum() const {
  std::ostringstream os;
  WriteBody(os);
  return Fnv1a64(os.str());
}

void PublicCache::Write(std::ostream &os) const {
  std::ostringstream body;
  WriteBody(body);
  const std::string text = body.str();
  os << text << "checksum " << Hex64(Fnv1a64(text)) << '\n';
}

std::shared_ptr<PublicCache> PublicCache::Read(
    std::istream &is, std::shared_ptr<const RecognitionGraph> graph) {
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const size_t pos = text.rfind("checksum ");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n'))
    throw DataError("cache dump has no checksum line");
  const std::string body = text.substr(0, pos);
  std::string recorded = text.substr(pos + 9);
  while (!recorded.empty() && (recorded.back() == '\n' || recorded.back() == '\r'))
    recorded.pop_back();
  if (recorded != Hex64(Fnv1a64(body)))
    throw DataError("cache dump checksum mismatch");

  auto cache = std::make_shared<PublicCache>(std::move(graph));
  std::istringstream in(body);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kDumpMagic)
    throw DataError("not a public cache dump");
  if (version != kDumpVersion)
    throw DataError("unsupported cache dump version " + std::to_string(version));
  std::string tok1, tok2;
  long long num_states = 0, num_expanded = 0;
  if (!(in >> tok1 >> num_states >> tok2 >> num_expanded) || tok1 != "states" ||
      tok2 != "expanded" || num_states < 0 || num_expanded < 0)
    throw DataError("bad cache dump header");
  for (long long i = 0; i < num_states; ++i) {
    std::string tag;
    long long id;
    int q1, root, cls, inner, filter;
    if (!(in >> tag >> id >> q1 >> root >> cls >> inner >> filter) || tag != "k" ||
        id != i || filter < 0 || filter > 2)
      throw DataError("bad key record " + std::to_string(i) + " in cache dump");
    ComposedStateKey key{q1, ReplaceState{root, cls, inner},
                         static_cast<FilterState>(filter)};
    if (!cache->graph_->IsValidKey(key))
      throw DataError("cache dump key " + KeyToString(key) + " does not fit the graph");
    if (cache->Intern(key) != id) throw DataError("duplicate key in cache dump");
  }
  for (long long i = 0; i < num_expanded; ++i) {
    std::string tag, final_str;
    long long id, narcs;
    if (!(in >> tag >> id >> final_str >> narcs) || tag != "e" || id < 0 ||
        id >= num_states || narcs < 0)
      throw DataError("bad expansion record in cache dump");
    Expansion e;
    if (!ParseWeight(final_str, &e.final)) throw DataError("bad final weight in cache dump");
    e.arcs.reserve(narcs);
    for (long long j = 0; j < narcs; ++j) {
      std::string atag, wstr;
      CachedArc a;
      if (!(in >> atag >> a.ilabel >> a.olabel >> wstr >> a.nextstate) || atag != "a" ||
          !ParseWeight(wstr, &a.weight))
        throw DataError("bad arc record in cache dump");
      e.arcs.push_back(a);
    }
    cache->Store(static_cast<StateId>(id), std::move(e));
  }
  try {
    cache->Seal();
  } catch (const InvariantError &e) {
    throw DataError(std::string("cache dump fails purity check: ") + e.what());
  }
  return cache;
}

Session::Session(std::shared_ptr<const PublicCache> pub, ClassBinding binding, int64_t id)
    : Session(std::move(pub), std::move(binding), id, PrecomposeTag{}) {
  if (!pub_->sealed())
    throw ConfigError("sessions require a sealed public cache");
}

Session::Session(std::shared_ptr<const PublicCache> pub, ClassBinding binding, int64_t id,
                 PrecomposeTag)
    : pub_(std::move(pub)),
      binding_(std::move(binding)),
      view_(pub_->graph().root(), pub_->graph().classes(), binding_),
      id_(id),
      n_pub_(pub_->NumStates()) {}

Session::~Session() {
  if (accounted_bytes_ != 0) pub_->memory().Add(-accounted_bytes_);
}

std::unique_ptr<Session> Session::ForPrecomposition(std::shared_ptr<const PublicCache> pub,
                                                    ClassBinding binding) {
  return std::unique_ptr<Session>(
      new Session(std::move(pub), std::move(binding), -1, PrecomposeTag{}));
}

const ComposedStateKey &Session::Key(StateId id) const {
  if (id < n_pub_) return pub_->Key(id);
  return private_keys_.at(id - n_pub_);
}

StateId Session::Intern(const ComposedStateKey &key) {
  if (StateId p = pub_->Find(key); p != kNoStateId && p < n_pub_) return p;
  auto [it, inserted] = private_ids_.emplace(
      key, n_pub_ + static_cast<StateId>(private_keys_.size()));
  if (inserted) private_keys_.push_back(key);
  return it->second;
}

StateId Session::Start() { return Intern(pub_->graph().StartKey()); }

const Expansion &Session::Expand(StateId id) {
  if (id < n_pub_) {
    if (const Expansion *e = pub_->Lookup(id)) {
      ++metrics_.public_hits;
      return *e;
    }
  }
  auto it = private_expansions_.find(id);
  if (it != private_expansions_.end()) {
    ++metrics_.private_hits;
    return it->second;
  }
  const ComposedStateKey key = Key(id);
  PairExpansion<ReplaceState> pe = ExpandPairState(key, pub_->graph().t1(), view_);
  Expansion e;
  e.final = pe.final;
  e.arcs.reserve(pe.arcs.size());
  for (const PairArc<ReplaceState> &a : pe.arcs)
    e.arcs.push_back({a.ilabel, a.olabel, a.weight, Intern(a.next)});
  ++metrics_.otf_expansions;
  private_arcs_ += e.arcs.size();
  const Expansion &stored = private_expansions_.emplace(id, std::move(e)).first->second;
  AccountBytes();
  return stored;
}

std::vector<StateId> Session::PrivatelyExpandedIds() const {
  std::vector<StateId> ids;
  ids.reserve(private_expansions_.size());
  for (const auto &[id, e] : private_expansions_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

size_t Session::PrivateBytes() const {
  return private_arcs_ * kModelArcBytes + private_expansions_.size() * kModelStateBytes +
         private_keys_.size() * kModelKeyBytes;
}

void Session::AccountBytes() {
  const int64_t now = static_cast<int64_t>(PrivateBytes());
  pub_->memory().Add(now - accounted_bytes_);
  accounted_bytes_ = now;
}

Metrics Session::metrics() const {
  Metrics m = metrics_;
  m.bytes_private = PrivateBytes();
  m.bytes_public = pub_->ModeledBytes();
  return m;
}

Metrics Session::End() {
  Metrics m = metrics();
  private_keys_.clear();
  private_ids_.clear();
  private_expansions_.clear();
  private_arcs_ = 0;
  AccountBytes();
  return m;
}

}  // namespace pcfst
