// pcfst/metrics.h

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

#ifndef PCFST_METRICS_H_
#define PCFST_METRICS_H_

#include <cstdint>

namespace pcfst {

// Graph-access counters. Within a session the counters only grow;
// utterance-level figures are differences of two snapshots.
struct Metrics {
  uint64_t otf_expansions = 0;
  uint64_t public_hits = 0;
  uint64_t private_hits = 0;
  uint64_t frames = 0;
  double wall_seconds = 0.0;
  uint64_t bytes_private = 0;
  uint64_t bytes_public = 0;

  uint64_t Lookups() const { return otf_expansions + public_hits + private_hits; }

  // Counter difference; byte fields keep the value of `*this`.
  Metrics Since(const Metrics &earlier) const {
    Metrics m = *this;
    m.otf_expansions -= earlier.otf_expansions;
    m.public_hits -= earlier.public_hits;
    m.private_hits -= earlier.private_hits;
    m.frames -= earlier.frames;
    m.wall_seconds -= earlier.wall_seconds;
    return m;
  }
};

}  // namespace pcfst

#endif  // PCFST_METRICS_H_
