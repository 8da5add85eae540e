// pcfst/scores.cc

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

#include "pcfst/scores.h"

#include <random>

#include "pcfst/errors.h"

namespace pcfst {

ScoreMatrix::ScoreMatrix(int num_frames, int num_labels)
    : num_frames_(num_frames), num_labels_(num_labels) {
  if (num_frames < 1) throw DataError("score matrix needs at least one frame");
  if (num_labels < 2) throw DataError("score matrix needs at least one label");
  data_.assign(static_cast<size_t>(num_frames) * num_labels,
               std::numeric_limits<double>::infinity());
}

void ScoreMatrix::SetCost(int frame, Label label, double cost) {
  if (frame < 0 || frame >= num_frames_ || label <= 0 || label >= num_labels_)
    throw DataError("score index out of range");
  if (!Weight::IsValidValue(cost)) throw DataError("acoustic cost must be non-negative");
  data_[static_cast<size_t>(frame) * num_labels_ + label] = cost;
}

ScoreMatrix SimulateScores(std::span<const Label> phones, int num_labels,
                           const SimulationConfig &config) {
  if (phones.empty()) throw DataError("empty reference phone sequence");
  if (config.frames_per_phone < 1) throw DataError("frames_per_phone must be >= 1");
  if (config.noise < 0.0 || config.margin < 0.0)
    throw DataError("noise and margin must be non-negative");
  for (Label p : phones)
    if (p <= 0 || p >= num_labels)
      throw DataError("reference phone label " + std::to_string(p) + " not in inventory");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int frames = static_cast<int>(phones.size()) * config.frames_per_phone;
  ScoreMatrix m(frames, num_labels);
  int t = 0;
  for (Label ref : phones) {
    for (int r = 0; r < config.frames_per_phone; ++r, ++t) {
      for (Label l = 1; l < num_labels; ++l) {
        double cost = (l == ref ? 0.0 : config.margin);
        if (config.noise > 0.0) cost += config.noise * unit(rng);
        m.SetCost(t, l, cost);
      }
    }
  }
  return m;
}

ScoreMatrix SimulateScores(const std::vector<std::string> &phones,
                           const SymbolTable &phone_syms, const SimulationConfig &config) {
  std::vector<Label> labels;
  labels.reserve(phones.size());
  for (const std::string &p : phones) {
    Label l = phone_syms.Find(p);
    if (l == kNoLabel || l == kEpsilon) throw DataError("unknown phone '" + p + "'");
    labels.push_back(l);
  }
  return SimulateScores(labels, phone_syms.Bound(), config);
}

}  // namespace pcfst
