// pcfst/wer.cc

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

#include "pcfst/wer.h"

#include <algorithm>
#include <cmath>

#include "pcfst/errors.h"

namespace pcfst {

double EditCounts::Wer() const {
  if (reference_words == 0) return Errors() == 0 ? 0.0 : 100.0;
  return 100.0 * static_cast<double>(Errors()) / static_cast<double>(reference_words);
}

EditCounts &EditCounts::operator+=(const EditCounts &other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  reference_words += other.reference_words;
  return *this;
}

EditCounts AlignWords(const std::vector<std::string> &reference,
                      const std::vector<std::string> &hypothesis) {
  const size_t n = reference.size(), m = hypothesis.size();
  // cost[i][j] aligns reference[0, i) with hypothesis[0, j).
  std::vector<std::vector<int64_t>> cost(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      cost[i][j] = std::min({cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1),
                             cost[i - 1][j] + 1, cost[i][j - 1] + 1});

  EditCounts counts;
  counts.reference_words = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int64_t diag = cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      if (diag == cost[i][j]) {
        if (reference[i - 1] != hypothesis[j - 1]) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost[i - 1][j] + 1 == cost[i][j]) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

double NearestRankPercentile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("percentile of an empty set");
  if (!(p > 0.0 && p <= 100.0)) throw DataError("percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

}  // namespace pcfst
