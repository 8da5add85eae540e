// pcfst/cache.h

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

// Two-layer cached decoding graph T = T1 o Replace(root, G_p).
//
// The public layer (PublicCache) holds a frozen state table segment with
// ids [0, N_pub) and the expansions computed during pre-composition. It is
// sealed before serving and then shared read-only by every session and
// thread. Each Session owns the private layer: a state table segment with
// ids >= N_pub and the expansions it computed on demand. Session::Expand()
// looks up public, then private, then computes with ExpandPairState() under
// the session's class binding. Public expansions only exist for states whose
// root state has no class out-arc, so they are valid for every binding and
// the private layer is a pure overlay.

#ifndef PCFST_CACHE_H_
#define PCFST_CACHE_H_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcfst/compose.h"
#include "pcfst/fst.h"
#include "pcfst/metrics.h"
#include "pcfst/replace.h"

namespace pcfst {

typedef PairState<ReplaceState> ComposedStateKey;
typedef PairStateHash<ReplaceState> ComposedStateKeyHash;

std::string KeyToString(const ComposedStateKey &key);

struct CachedArc {
  Label ilabel;
  Label olabel;
  Weight weight;
  StateId nextstate;

  friend bool operator==(const CachedArc &, const CachedArc &) = default;
};

struct Expansion {
  std::vector<CachedArc> arcs;
  Weight final = Weight::Zero();

  friend bool operator==(const Expansion &, const Expansion &) = default;
};

// Fixed per-item footprints of the memory model. Deterministic and
// platform independent so that reports can be compared across machines.
constexpr size_t kModelArcBytes = 16;
constexpr size_t kModelStateBytes = 24;
constexpr size_t kModelKeyBytes = 24;

// T1, the (epsilon-transformed) class root and its class labels.
class RecognitionGraph {
 public:
  RecognitionGraph(std::shared_ptr<const Fst> t1, std::shared_ptr<const Fst> root,
                   ClassLabelSet classes);

  const Fst &t1() const { return *t1_; }
  const Fst &root() const { return *root_; }
  const std::shared_ptr<const Fst> &t1_ptr() const { return t1_; }
  const std::shared_ptr<const Fst> &root_ptr() const { return root_; }
  const ClassLabelSet &classes() const { return classes_; }

  ComposedStateKey StartKey() const;
  // Cached form of the restriction predicate: ROOT(q_c) with no class-label
  // out-arc at q_c.
  bool IsPrecomposable(const ReplaceState &q2) const {
    return q2.IsRoot() && !class_state_[q2.root];
  }
  bool IsValidKey(const ComposedStateKey &key) const;

 private:
  std::shared_ptr<const Fst> t1_;
  std::shared_ptr<const Fst> root_;
  ClassLabelSet classes_;
  std::vector<bool> class_state_;
};

// Process-wide accounting of live private-cache bytes for one public cache.
class MemoryAccount {
 public:
  void Add(int64_t bytes) { live_.fetch_add(bytes, std::memory_order_relaxed); }
  int64_t Live() const { return live_.load(std::memory_order_relaxed); }

 private:
  std::atomic<int64_t> live_{0};
};

class PublicCache {
 public:
  explicit PublicCache(std::shared_ptr<const RecognitionGraph> graph);
  PublicCache(const PublicCache &) = delete;
  PublicCache &operator=(const PublicCache &) = delete;

  // Pre-composition phase (unsealed only; throws ConfigError otherwise).
  StateId Intern(const ComposedStateKey &key);
  void Store(StateId id, Expansion expansion);

  // Verifies purity (no INSIDE keys, every expanded state precomposable,
  // all arc destinations inside the public segment) and freezes the cache.
  // Throws InvariantError naming the offending key. Idempotent.
  void Seal();
  bool sealed() const { return sealed_; }

  StateId Find(const ComposedStateKey &key) const;  // kNoStateId if absent
  const ComposedStateKey &Key(StateId id) const { return keys_[id]; }
  const Expansion *Lookup(StateId id) const {
    return has_expansion_[id] ? &expansions_[id] : nullptr;
  }
  bool IsExpanded(StateId id) const { return has_expansion_[id]; }

  StateId NumStates() const { return static_cast<StateId>(keys_.size()); }
  size_t NumExpanded() const { return num_expanded_; }
  size_t NumArcs() const { return num_arcs_; }
  size_t ModeledBytes() const;

  // FNV-1a 64 of the canonical dump body.
  uint64_t Checksum() const;
  // Checksum recorded at sealing time (0 before).
  uint64_t SealedChecksum() const { return sealed_checksum_; }

  // Versioned, checksummed text dump; Read() verifies the checksum, checks
  // keys against `graph` and returns a sealed cache.
  void Write(std::ostream &os) const;
  static std::shared_ptr<PublicCache> Read(std::istream &is,
                                           std::shared_ptr<const RecognitionGraph> graph);

  const RecognitionGraph &graph() const { return *graph_; }
  const std::shared_ptr<const RecognitionGraph> &graph_ptr() const { return graph_; }
  MemoryAccount &memory() const { return memory_; }

 private:
  void RequireUnsealed(const char *what) const;
  void WriteBody(std::ostream &os) const;

  std::shared_ptr<const RecognitionGraph> graph_;
  std::vector<ComposedStateKey> keys_;
  std::unordered_map<ComposedStateKey, StateId, ComposedStateKeyHash> ids_;
  std::vector<Expansion> expansions_;
  std::vector<bool> has_expansion_;
  size_t num_expanded_ = 0;
  size_t num_arcs_ = 0;
  bool sealed_ = false;
  uint64_t sealed_checksum_ = 0;
  mutable MemoryAccount memory_;
};

// One user's dialog session: class binding, private cache and counters.
// Confined to one thread at a time. Not copyable or movable (the internal
// replace view refers to the session's own binding).
class Session {
 public:
  // Throws ConfigError if `pub` is not sealed.
  Session(std::shared_ptr<const PublicCache> pub, ClassBinding binding,
          int64_t id = 0);
  ~Session();
  Session(const Session &) = delete;
  Session &operator=(const Session &) = delete;

  // For pre-composition only: a session over a cache that is still being
  // built. The cache must not be modified while the session is alive.
  static std::unique_ptr<Session> ForPrecomposition(std::shared_ptr<const PublicCache> pub,
                                                    ClassBinding binding);

  // Returns the expansion of `id`, counting exactly one of public hit,
  // private hit or on-the-fly expansion. The reference stays valid until
  // End() or destruction.
  const Expansion &Expand(StateId id);

  StateId Start();
  const ComposedStateKey &Key(StateId id) const;
  StateId Intern(const ComposedStateKey &key);

  int64_t id() const { return id_; }
  const PublicCache &public_cache() const { return *pub_; }
  StateId NumPublicStates() const { return n_pub_; }
  size_t NumPrivateStates() const { return private_keys_.size(); }
  size_t NumPrivateExpanded() const { return private_expansions_.size(); }
  // Ids (public or private) whose expansion lives in this session's layer,
  // ascending.
  std::vector<StateId> PrivatelyExpandedIds() const;
  size_t PrivateBytes() const;

  // Adds decoded frames and wall time to the session counters.
  void RecordDecode(uint64_t frames, double seconds) {
    metrics_.frames += frames;
    metrics_.wall_seconds += seconds;
  }

  // Current counters with bytes_private / bytes_public filled in.
  Metrics metrics() const;
  // Releases the private layer and returns the final counters.
  Metrics End();

 private:
  struct PrecomposeTag {};
  Session(std::shared_ptr<const PublicCache> pub, ClassBinding binding, int64_t id,
          PrecomposeTag);
  void AccountBytes();

  std::shared_ptr<const PublicCache> pub_;
  ClassBinding binding_;
  ReplaceView view_;
  int64_t id_;
  StateId n_pub_;
  std::vector<ComposedStateKey> private_keys_;
  std::unordered_map<ComposedStateKey, StateId, ComposedStateKeyHash> private_ids_;
  std::unordered_map<StateId, Expansion> private_expansions_;
  size_t private_arcs_ = 0;
  int64_t accounted_bytes_ = 0;
  Metrics metrics_;
};

}  // namespace pcfst

#endif  // PCFST_CACHE_H_
