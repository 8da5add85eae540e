// pcfst/wer.h

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

#ifndef PCFST_WER_H_
#define PCFST_WER_H_

#include <cstdint>
#include <string>
#include <vector>

namespace pcfst {

struct EditCounts {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t reference_words = 0;

  int64_t Errors() const { return substitutions + insertions + deletions; }
  // Percent; 0 for an empty reference with no insertions.
  double Wer() const;
  EditCounts &operator+=(const EditCounts &other);
};

// Word-level Levenshtein alignment with unit costs. Among alignments with
// the minimal number of errors, prefers substitutions, then deletions, then
// insertions when splitting the count.
EditCounts AlignWords(const std::vector<std::string> &reference,
                      const std::vector<std::string> &hypothesis);

// Nearest-rank percentile: the smallest value v such that at least p% of
// the samples are <= v. p in (0, 100]. Throws DataError on empty input.
double NearestRankPercentile(std::vector<double> values, double p);

}  // namespace pcfst

#endif  // PCFST_WER_H_
