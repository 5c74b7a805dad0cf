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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rhetoric/annotation.hpp"
#include "rhetoric/csv.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/stats.hpp"
#include "rhetoric/strategy.hpp"

namespace rhetoric::metrics {

/// Spearman's rho with average ranks for ties. Rejects constant inputs and
/// n < 3 rather than returning 0.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::LengthMismatch, "spearman");
  if (xs.size() < 3) throw Error(ErrorKind::DegenerateInput, "spearman needs at least 3 pairs");
  auto rx = stats::average_ranks(xs);
  auto ry = stats::average_ranks(ys);
  return stats::pearson(rx, ry);
}

inline double rmse(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size()) throw Error(ErrorKind::LengthMismatch, "rmse");
  if (preds.empty()) throw Error(ErrorKind::EmptyInput, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) ss += (preds[i] - targets[i]) * (preds[i] - targets[i]);
  return std::sqrt(ss / static_cast<double>(preds.size()));
}

// ---------------------------------------------------------------------------
// Class schemes and kappa

enum class ClassScheme { FiveClass, ThreeClass, TwoClass };

inline ClassScheme parse_scheme(int classes) {
  switch (classes) {
    case 5: return ClassScheme::FiveClass;
    case 3: return ClassScheme::ThreeClass;
    case 2: return ClassScheme::TwoClass;
  }
  throw Error(ErrorKind::InvalidArgument, "scheme must be 5, 3 or 2");
}

inline std::string_view to_string(ClassScheme s) {
  switch (s) {
    case ClassScheme::FiveClass: return "five_class";
    case ClassScheme::ThreeClass: return "three_class";
    case ClassScheme::TwoClass: return "two_class";
  }
  return "?";
}

/// Ordered class label. ThreeClass: 0 = no {1,2}, 1 = uncertain {3}, 2 = yes
/// {4,5}. TwoClass: 0 = no/uncertain {1,2,3}, 1 = yes {4,5}.
inline int collapse(int x, ClassScheme scheme) {
  if (x < 1 || x > 5) throw Error(ErrorKind::OutOfRange, "Likert value " + std::to_string(x));
  switch (scheme) {
    case ClassScheme::FiveClass: return x;
    case ClassScheme::ThreeClass: return x <= 2 ? 0 : (x == 3 ? 1 : 2);
    case ClassScheme::TwoClass: return x >= 4 ? 1 : 0;
  }
  return x;
}

inline std::string_view class_name(int label, ClassScheme scheme) {
  static constexpr std::array<std::string_view, 5> five = {"1", "2", "3", "4", "5"};
  switch (scheme) {
    case ClassScheme::FiveClass: return five.at(static_cast<std::size_t>(label - 1));
    case ClassScheme::ThreeClass: return label == 0 ? "no" : (label == 1 ? "uncertain" : "yes");
    case ClassScheme::TwoClass: return label == 1 ? "yes" : "no/uncertain";
  }
  return "?";
}

/// Unweighted Cohen's kappa over the union of both label sets.
inline double cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "cohen_kappa");
  if (a.empty()) throw Error(ErrorKind::EmptyInput, "cohen_kappa");
  const double n = static_cast<double>(a.size());
  std::map<int, double> fa, fb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    fa[a[i]] += 1.0;
    fb[b[i]] += 1.0;
    agree += a[i] == b[i];
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : fa) {
    if (auto it = fb.find(label); it != fb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

// ---------------------------------------------------------------------------
// Annotation matrix

/// Sparse item x rater Likert ratings, one layer per strategy.
class AnnotationMatrix {
 public:
  void add(const std::string& item, const std::string& rater, StrategyKind s, int likert) {
    if (likert < 1 || likert > 5) throw Error(ErrorKind::OutOfRange, "Likert value " + std::to_string(likert));
    const auto i = intern(item, items_, item_index_);
    const auto r = intern(rater, raters_, rater_index_);
    cells_[index_of(s)][{i, r}] = likert;
  }

  /// `human_scores.csv`: item_id,rater_id,strategy,likert
  static AnnotationMatrix from_csv(const std::string& path) {
    auto t = csv::Table::from_file(path);
    AnnotationMatrix m;
    for (std::size_t r = 0; r < t.size(); ++r) {
      int v = 0;
      try {
        v = std::stoi(t.at(r, "likert"));
      } catch (const std::exception&) {
        throw SchemaError(r + 2, "likert is not an integer");
      }
      m.add(t.at(r, "item_id"), t.at(r, "rater_id"), parse_strategy(t.at(r, "strategy")), v);
    }
    if (m.raters_.size() < 2) throw Error(ErrorKind::SchemaViolation, path + ": fewer than two raters");
    return m;
  }

  const std::vector<std::string>& items() const { return items_; }
  const std::vector<std::string>& raters() const { return raters_; }

  std::optional<int> get(std::size_t item, std::size_t rater, StrategyKind s) const {
    const auto& layer = cells_[index_of(s)];
    auto it = layer.find({item, rater});
    if (it == layer.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> item_index(const std::string& id) const {
    auto it = item_index_.find(id);
    if (it == item_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> rater_index(const std::string& id) const {
    auto it = rater_index_.find(id);
    if (it == rater_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Raters with a rating for (item, strategy).
  std::vector<std::size_t> raters_of(std::size_t item, StrategyKind s) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < raters_.size(); ++r) {
      if (get(item, r, s)) out.push_back(r);
    }
    return out;
  }

 private:
  static std::size_t intern(const std::string& id, std::vector<std::string>& ids,
                            std::map<std::string, std::size_t>& index) {
    auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  }

  std::vector<std::string> items_;
  std::vector<std::string> raters_;
  std::map<std::string, std::size_t> item_index_;
  std::map<std::string, std::size_t> rater_index_;
  std::array<std::map<std::pair<std::size_t, std::size_t>, int>, 4> cells_;
};

struct KappaSummary {
  double average = 0.0;
  std::size_t qualifying_pairs = 0;
};

/// Mean Cohen's kappa over rater pairs that co-rated at least `min_overlap`
/// items, after collapsing both raters' labels with `scheme`.
inline KappaSummary pairwise_average_kappa(const AnnotationMatrix& m, StrategyKind s, ClassScheme scheme,
                                           std::size_t min_overlap = 10) {
  const auto n_raters = m.raters().size();
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t r1 = 0; r1 < n_raters; ++r1) {
    for (std::size_t r2 = r1 + 1; r2 < n_raters; ++r2) {
      std::vector<int> a, b;
      for (std::size_t i = 0; i < m.items().size(); ++i) {
        auto x = m.get(i, r1, s);
        auto y = m.get(i, r2, s);
        if (x && y) {
          a.push_back(collapse(*x, scheme));
          b.push_back(collapse(*y, scheme));
        }
      }
      if (a.size() >= std::max<std::size_t>(min_overlap, 1)) {
        total += cohen_kappa(a, b);
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw Error(ErrorKind::NoQualifyingPairs, std::string(to_string(s)));
  return {total / static_cast<double>(pairs), pairs};
}

// ---------------------------------------------------------------------------
// Leave-one-out consensus

namespace detail {

/// Spearman between `own` scores and a ground truth, requiring >= 3 items.
inline double loo_correlation(const std::vector<double>& own, const std::vector<double>& truth,
                              const std::string& who) {
  if (own.size() < 3) throw Error(ErrorKind::InsufficientOverlap, who);
  return spearman(own, truth);
}

}  // namespace detail

/// Spearman between one rater's normalized scores and the mean normalized
/// score of the other raters, over items where at least two others rated.
inline double loo_rater(const AnnotationMatrix& m, StrategyKind s, std::size_t rater) {
  std::vector<double> own, truth;
  for (std::size_t i = 0; i < m.items().size(); ++i) {
    auto mine = m.get(i, rater, s);
    if (!mine) continue;
    double sum = 0.0;
    std::size_t others = 0;
    for (auto r : m.raters_of(i, s)) {
      if (r == rater) continue;
      sum += normalize_likert(*m.get(i, r, s));
      ++others;
    }
    if (others < 2) continue;
    own.push_back(normalize_likert(*mine));
    truth.push_back(sum / static_cast<double>(others));
  }
  return detail::loo_correlation(own, truth, m.raters()[rater]);
}

/// Same comparison for a scorer outside the panel (an LLM): its scores
/// against the mean of all human raters on items with >= 2 human ratings.
inline double loo_external(const AnnotationMatrix& m, StrategyKind s, const std::map<std::string, double>& external,
                           const std::string& name = "external") {
  std::vector<double> own, truth;
  for (std::size_t i = 0; i < m.items().size(); ++i) {
    auto it = external.find(m.items()[i]);
    if (it == external.end()) continue;
    const auto raters = m.raters_of(i, s);
    if (raters.size() < 2) continue;
    double sum = 0.0;
    for (auto r : raters) sum += normalize_likert(*m.get(i, r, s));
    own.push_back(it->second);
    truth.push_back(sum / static_cast<double>(raters.size()));
  }
  return detail::loo_correlation(own, truth, name);
}

struct LooResult {
  std::map<std::string, double> per_rater;
  /// Raters left out of the average, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
  double average = 0.0;
};

/// loo_rater for every rater. Raters with too little overlap, or whose
/// scores are constant, are skipped and listed.
inline LooResult loo_consensus(const AnnotationMatrix& m, StrategyKind s) {
  LooResult out;
  double total = 0.0;
  for (std::size_t r = 0; r < m.raters().size(); ++r) {
    try {
      const double rho = loo_rater(m, s, r);
      out.per_rater[m.raters()[r]] = rho;
      total += rho;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientOverlap && e.kind() != ErrorKind::DegenerateInput) throw;
      out.skipped.emplace_back(m.raters()[r], std::string(rhetoric::to_string(e.kind())));
    }
  }
  if (out.per_rater.empty()) throw Error(ErrorKind::InsufficientOverlap, "no rater qualifies");
  out.average = total / static_cast<double>(out.per_rater.size());
  return out;
}

// ---------------------------------------------------------------------------
// t-tests

struct TTestResult {
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch's unequal-variance two-sample t-test, two-sided; mean_diff = g1 - g2.
inline TTestResult welch_t_test(std::span<const double> g1, std::span<const double> g2) {
  if (g1.size() < 2 || g2.size() < 2) throw Error(ErrorKind::DegenerateInput, "each group needs >= 2 values");
  const double n1 = static_cast<double>(g1.size());
  const double n2 = static_cast<double>(g2.size());
  const double v1 = stats::sample_variance(g1) / n1;
  const double v2 = stats::sample_variance(g2) / n2;
  if (v1 + v2 == 0.0) throw Error(ErrorKind::DegenerateInput, "both groups are constant");
  TTestResult r;
  r.mean_diff = stats::mean(g1) - stats::mean(g2);
  r.t = r.mean_diff / std::sqrt(v1 + v2);
  r.df = (v1 + v2) * (v1 + v2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
  r.p = stats::t_two_sided_p(r.t, r.df);
  return r;
}

/// Paired t-test on a[i] - b[i], two-sided.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "paired_t_test");
  if (a.size() < 2) throw Error(ErrorKind::DegenerateInput, "paired test needs >= 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  TTestResult r;
  r.mean_diff = stats::mean(d);
  r.df = static_cast<double>(d.size()) - 1.0;
  const double se = std::sqrt(stats::sample_variance(d) / static_cast<double>(d.size()));
  if (se == 0.0) {
    r.t = r.mean_diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
    r.p = r.mean_diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = r.mean_diff / se;
  r.p = stats::t_two_sided_p(r.t, r.df);
  return r;
}

inline nlohmann::ordered_json to_json(const TTestResult& r) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  return {{"mean_diff", r.mean_diff}, {"t", finite(r.t)}, {"df", finite(r.df)}, {"p", r.p}};
}

// ---------------------------------------------------------------------------
// Validity reports

/// One scored argument from a strategy-conditioned dialogue.
struct ConditionedScore {
  StrategyKind target = StrategyKind::Causal;
  Condition condition = Condition::Use;
  StrategyScoreVector scores;
};

struct ValidityReport {
  std::size_t n_use = 0;
  std::size_t n_avoid = 0;
  double spearman = 0.0;
};

/// For each strategy, Spearman between use(1)/avoid(0) and that strategy's
/// score, over arguments from dialogues targeting the strategy.
inline PerStrategy<ValidityReport> condition_validity(const std::vector<ConditionedScore>& corpus) {
  PerStrategy<ValidityReport> out;
  for (auto s : kAllStrategies) {
    std::vector<double> x, y;
    for (const auto& c : corpus) {
      if (c.target != s) continue;
      x.push_back(c.condition == Condition::Use ? 1.0 : 0.0);
      y.push_back(c.scores[s]);
      (c.condition == Condition::Use ? out[s].n_use : out[s].n_avoid)++;
    }
    if (out[s].n_use == 0 || out[s].n_avoid == 0) throw Error(ErrorKind::MissingCondition, std::string(to_string(s)));
    out[s].spearman = spearman(x, y);
  }
  return out;
}

/// Row of an external corpus with a binary gold label relevant to `strategy`.
struct ExternalRow {
  std::string dataset;
  std::string label;
  StrategyKind strategy = StrategyKind::Causal;
  bool positive = false;
  double score = 0.0;
};

struct ExternalValidity {
  std::string dataset;
  std::string label;
  StrategyKind strategy = StrategyKind::Causal;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  TTestResult test;  // mean_diff = mean(pos) - mean(neg)
};

/// Positive-minus-negative mean score per (dataset, label, strategy), with
/// Welch tests; groups keep first-appearance order.
inline std::vector<ExternalValidity> external_validity(const std::vector<ExternalRow>& rows) {
  std::vector<std::tuple<std::string, std::string, StrategyKind>> keys;
  std::map<std::tuple<std::string, std::string, StrategyKind>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.dataset, r.label, r.strategy);
    if (!groups.count(key)) keys.push_back(key);
    auto& g = groups[key];
    (r.positive ? g.first : g.second).push_back(r.score);
  }
  std::vector<ExternalValidity> out;
  for (const auto& key : keys) {
    const auto& [pos, neg] = groups[key];
    ExternalValidity v{std::get<0>(key), std::get<1>(key), std::get<2>(key), pos.size(), neg.size(), {}};
    v.test = welch_t_test(pos, neg);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace rhetoric::metrics
