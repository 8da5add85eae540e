// pcfst/scores.h

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

#ifndef PCFST_SCORES_H_
#define PCFST_SCORES_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pcfst/symbol-table.h"
#include "pcfst/weight.h"

namespace pcfst {

// Per-frame acoustic costs indexed by T1 input label. Label 0 (epsilon)
// is never scored.
class ScoreMatrix {
 public:
  static constexpr double kFrameSeconds = 0.01;

  ScoreMatrix(int num_frames, int num_labels);

  int NumFrames() const { return num_frames_; }
  int NumLabels() const { return num_labels_; }
  double Cost(int frame, Label label) const {
    if (label <= 0 || label >= num_labels_) return std::numeric_limits<double>::infinity();
    return data_[static_cast<size_t>(frame) * num_labels_ + label];
  }
  void SetCost(int frame, Label label, double cost);
  double Seconds() const { return num_frames_ * kFrameSeconds; }

  bool operator==(const ScoreMatrix &other) const = default;

 private:
  int num_frames_;
  int num_labels_;
  std::vector<double> data_;
};

struct SimulationConfig {
  int frames_per_phone = 3;
  double margin = 4.0;  // cost of a wrong label before noise
  double noise = 0.0;   // upper bound of the uniform noise added to every cost
  uint64_t seed = 0;
};

// Emits `frames_per_phone` frames per reference phone. The reference label
// costs noise*U[0,1); every other label costs margin + noise*U[0,1).
// Deterministic for a given seed. Throws DataError on labels outside
// [1, num_labels).
ScoreMatrix SimulateScores(std::span<const Label> phones, int num_labels,
                           const SimulationConfig &config);
ScoreMatrix SimulateScores(const std::vector<std::string> &phones,
                           const SymbolTable &phone_syms, const SimulationConfig &config);

}  // namespace pcfst

#endif  // PCFST_SCORES_H_
