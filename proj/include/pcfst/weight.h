// pcfst/weight.h

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

#ifndef PCFST_WEIGHT_H_
#define PCFST_WEIGHT_H_

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace pcfst {

typedef int32_t Label;
typedef int32_t StateId;

constexpr Label kEpsilon = 0;
constexpr Label kNoLabel = -1;
constexpr StateId kNoStateId = -1;

// Tropical semiring weight: Plus is min, Times is +, Zero is +inf and One
// is 0. Values are non-negative costs; NaN and negative values are rejected
// by FromValue() and asserted against elsewhere.
class Weight {
 public:
  constexpr Weight() : value_(0.0) {}
  constexpr explicit Weight(double value) : value_(value) {}

  // Checked construction for values coming from outside (files, configs).
  static bool IsValidValue(double v) { return !std::isnan(v) && v >= 0.0; }

  static constexpr Weight Zero() {
    return Weight(std::numeric_limits<double>::infinity());
  }
  static constexpr Weight One() { return Weight(0.0); }

  constexpr double Value() const { return value_; }
  bool IsZero() const { return std::isinf(value_); }

  friend constexpr Weight Plus(Weight a, Weight b) {
    return a.value_ <= b.value_ ? a : b;
  }
  friend constexpr Weight Times(Weight a, Weight b) {
    return Weight(a.value_ + b.value_);
  }

  friend constexpr bool operator==(Weight a, Weight b) {
    return a.value_ == b.value_;
  }
  friend constexpr bool operator<(Weight a, Weight b) {
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(Weight a, Weight b) {
    return a.value_ <= b.value_;
  }

 private:
  double value_;
};

// Shortest decimal text that parses back to the same double; always carries
// a decimal point ("0.0", "0.5", "inf").
std::string FormatWeight(Weight w);

// Parses a weight token. Accepts "inf"/"Infinity". Returns false on
// malformed, negative or NaN input.
bool ParseWeight(const std::string &token, Weight *w);

}  // namespace pcfst

#endif  // PCFST_WEIGHT_H_
