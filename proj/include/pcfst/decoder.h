// pcfst/decoder.h

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

// Frame-synchronous token-passing Viterbi beam decoder over a Session.
//
// Each frame first consumes one emitting arc per token (acoustic cost of
// the arc's input label plus the graph weight), then runs a Dijkstra-style
// epsilon closure, then prunes to `beam` around the best token and to at
// most `max_active` tokens. Ties between equal costs are broken by the
// composed state key, never by the session-local state id, so the search is
// identical whatever parts of the graph happen to be cached.

#ifndef PCFST_DECODER_H_
#define PCFST_DECODER_H_

#include <cstddef>
#include <limits>
#include <vector>

#include "pcfst/cache.h"
#include "pcfst/metrics.h"
#include "pcfst/scores.h"

namespace pcfst {

struct DecodeConfig {
  double beam = 12.0;
  int max_active = 4000;
  // Upper bound on epsilon-closure pops per frame; exceeding it throws
  // ResourceError instead of looping forever on a degenerate graph.
  size_t max_closure_pops = 2000000;

  void Validate() const;

  static DecodeConfig Unpruned() {
    DecodeConfig c;
    c.beam = std::numeric_limits<double>::infinity();
    c.max_active = std::numeric_limits<int>::max();
    return c;
  }
};

struct Hypothesis {
  bool found = false;  // false: no token survived to a final state
  Weight cost = Weight::Zero();
  std::vector<Label> words;  // non-epsilon output labels along the best path
  Metrics metrics;           // counters for this utterance only
};

Hypothesis Decode(const ScoreMatrix &scores, Session *session, const DecodeConfig &config);

// Real-time factor: wall seconds / (frames * 0.01 s). Throws DataError when
// the hypothesis has no frames.
double Rtf(const Hypothesis &hyp);

}  // namespace pcfst

#endif  // PCFST_DECODER_H_
