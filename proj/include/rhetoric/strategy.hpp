// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "rhetoric/error.hpp"

namespace rhetoric {

/// The four rhetorical strategies. Causal and empirical are the cognitive
/// pair, emotional and moral the affective pair.
enum class StrategyKind { Causal = 0, Empirical = 1, Emotional = 2, Moral = 3 };

inline constexpr std::array<StrategyKind, 4> kAllStrategies = {
    StrategyKind::Causal, StrategyKind::Empirical, StrategyKind::Emotional, StrategyKind::Moral};

enum class Condition { Use, Avoid };

inline constexpr std::array<Condition, 2> kAllConditions = {Condition::Use, Condition::Avoid};

inline std::string_view to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::Causal: return "causal";
    case StrategyKind::Empirical: return "empirical";
    case StrategyKind::Emotional: return "emotional";
    case StrategyKind::Moral: return "moral";
  }
  return "?";
}

inline std::string_view to_string(Condition c) { return c == Condition::Use ? "use" : "avoid"; }

inline StrategyKind parse_strategy(std::string_view s) {
  for (auto k : kAllStrategies) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + std::string(s) + "'");
}

inline Condition parse_condition(std::string_view s) {
  if (s == "use") return Condition::Use;
  if (s == "avoid") return Condition::Avoid;
  throw Error(ErrorKind::InvalidArgument, "unknown condition '" + std::string(s) + "'");
}

inline std::size_t index_of(StrategyKind s) { return static_cast<std::size_t>(s); }

/// Four per-strategy values indexed by StrategyKind.
template <typename T>
struct PerStrategy {
  std::array<T, 4> values{};

  T& operator[](StrategyKind s) { return values[index_of(s)]; }
  const T& operator[](StrategyKind s) const { return values[index_of(s)]; }

  T& causal() { return values[0]; }
  T& empirical() { return values[1]; }
  T& emotional() { return values[2]; }
  T& moral() { return values[3]; }
  const T& causal() const { return values[0]; }
  const T& empirical() const { return values[1]; }
  const T& emotional() const { return values[2]; }
  const T& moral() const { return values[3]; }

  friend bool operator==(const PerStrategy&, const PerStrategy&) = default;
};

/// One rater's 1..5 Likert ratings (1 = definitely not using, 5 = definitely using).
struct LikertVector : PerStrategy<int> {
  LikertVector() = default;
  LikertVector(int c, int e, int em, int mo) : PerStrategy<int>{{c, e, em, mo}} {
    for (int v : values) {
      if (v < 1 || v > 5) throw Error(ErrorKind::OutOfRange, "Likert value " + std::to_string(v));
    }
  }
};

/// Normalized strategy scores, each in [0, 1].
struct StrategyScoreVector : PerStrategy<double> {
  StrategyScoreVector() = default;
  StrategyScoreVector(double c, double e, double em, double mo) : PerStrategy<double>{{c, e, em, mo}} {
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::OutOfRange, "score " + std::to_string(v));
    }
  }
};

}  // namespace rhetoric
