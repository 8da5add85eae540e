// pcfst/determinize.h

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

#ifndef PCFST_DETERMINIZE_H_
#define PCFST_DETERMINIZE_H_

#include <functional>

#include "pcfst/fst.h"

namespace pcfst {

bool IsAcyclic(const Fst &fst);
bool IsAcceptor(const Fst &fst);
// No epsilon input labels and no two arcs of a state sharing an input label.
bool IsInputDeterministic(const Fst &fst);

// Weighted subset construction for acyclic, epsilon-free acceptors over the
// tropical semiring. Throws DataError on cyclic input, non-acceptors or
// epsilon arcs.
Fst DeterminizeAcyclic(const Fst &fst);

// Merges states with identical futures (final weight and outgoing
// label/weight/destination-class signature), bottom-up. Input must be
// acyclic and input-deterministic. Weights are not pushed.
Fst MinimizeAcyclic(const Fst &fst);

// Relabels every input and output label satisfying `pred` to epsilon, then
// merges parallel arcs (same labels and destination) keeping the smallest
// weight.
Fst ReplaceLabelsWithEpsilon(const Fst &fst, const std::function<bool(Label)> &pred);

}  // namespace pcfst

#endif  // PCFST_DETERMINIZE_H_
