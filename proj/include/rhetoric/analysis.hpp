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
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rhetoric/csv.hpp"
#include "rhetoric/debate.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/log.hpp"
#include "rhetoric/metrics.hpp"
#include "rhetoric/stats.hpp"
#include "rhetoric/strategy.hpp"

namespace rhetoric {

enum class Party { Democrat, Republican, Moderator, Other };

inline std::string_view to_string(Party p) {
  switch (p) {
    case Party::Democrat: return "Democrat";
    case Party::Republican: return "Republican";
    case Party::Moderator: return "Moderator";
    case Party::Other: return "Other";
  }
  return "?";
}

inline std::optional<Party> parse_party(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "democrat") return Party::Democrat;
  if (lower == "republican") return Party::Republican;
  if (lower == "moderator") return Party::Moderator;
  if (lower == "other") return Party::Other;
  return std::nullopt;
}

inline constexpr int kMinElectionYear = 1960;
inline constexpr int kMaxElectionYear = 2100;
inline constexpr int kMinArgumentWords = 5;

struct TranscriptTurn {
  int year = kMinElectionYear;
  std::string debate_id;
  std::string speaker;
  Party party = Party::Other;
  std::string text;
};

struct AnalysisArgument {
  int year = kMinElectionYear;
  std::string debate_id;
  std::string speaker;
  Party party = Party::Democrat;
  std::string text;
  int word_count = 0;
  std::optional<StrategyScoreVector> scores;
};

/// Reads `year,debate_id,speaker,party,text` rows in spoken order.
inline std::vector<TranscriptTurn> read_transcripts(const std::string& path) {
  const auto table = csv::Table::from_file(path);
  std::vector<TranscriptTurn> out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    TranscriptTurn t;
    const auto& year = table.at(r, "year");
    try {
      std::size_t used = 0;
      t.year = std::stoi(year, &used);
      if (used != year.size()) throw std::invalid_argument(year);
    } catch (const std::exception&) {
      throw SchemaError(r + 2, "bad year '" + year + "'");
    }
    if (t.year < kMinElectionYear || t.year > kMaxElectionYear) {
      throw SchemaError(r + 2, "year " + year + " outside [1960, 2100]");
    }
    t.debate_id = table.at(r, "debate_id");
    t.speaker = table.at(r, "speaker");
    auto party = parse_party(table.at(r, "party"));
    if (!party) throw SchemaError(r + 2, "unknown party '" + table.at(r, "party") + "'");
    t.party = *party;
    t.text = table.at(r, "text");
    out.push_back(std::move(t));
  }
  return out;
}

/// One argument per major-party turn of at least five words.
inline std::vector<AnalysisArgument> segment_arguments(const std::vector<TranscriptTurn>& turns) {
  std::vector<AnalysisArgument> out;
  for (const auto& t : turns) {
    if (t.party != Party::Democrat && t.party != Party::Republican) continue;
    const int words = count_words(t.text);
    if (words < kMinArgumentWords) continue;
    out.push_back({t.year, t.debate_id, t.speaker, t.party, t.text, words, std::nullopt});
  }
  return out;
}

inline nlohmann::ordered_json to_json(const AnalysisArgument& a) {
  nlohmann::ordered_json j;
  j["year"] = a.year;
  j["debate_id"] = a.debate_id;
  j["speaker"] = a.speaker;
  j["party"] = std::string(to_string(a.party));
  j["text"] = a.text;
  j["word_count"] = a.word_count;
  j["scores"] = a.scores ? to_json(*a.scores) : nlohmann::ordered_json(nullptr);
  return j;
}

inline AnalysisArgument analysis_argument_from_json(const nlohmann::json& j) {
  AnalysisArgument a;
  a.year = j.at("year").get<int>();
  a.debate_id = j.at("debate_id").get<std::string>();
  a.speaker = j.at("speaker").get<std::string>();
  auto party = parse_party(j.at("party").get<std::string>());
  if (!party || (*party != Party::Democrat && *party != Party::Republican)) {
    throw Error(ErrorKind::SchemaViolation, "argument party must be Democrat or Republican");
  }
  a.party = *party;
  a.text = j.at("text").get<std::string>();
  a.word_count = j.at("word_count").get<int>();
  if (j.contains("scores") && !j.at("scores").is_null()) a.scores = scores_from_json(j.at("scores"));
  return a;
}

// ---------------------------------------------------------------------------
// Scoring

/// Maps a batch of texts to strategy scores; a nullopt entry marks a
/// per-item failure. Throws on whole-batch failure.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<std::optional<StrategyScoreVector>> score(const std::vector<std::string>& texts) = 0;
};

class ConstantScorer : public Scorer {
 public:
  explicit ConstantScorer(StrategyScoreVector value) : value_(value) {}
  std::vector<std::optional<StrategyScoreVector>> score(const std::vector<std::string>& texts) override {
    return std::vector<std::optional<StrategyScoreVector>>(texts.size(), value_);
  }

 private:
  StrategyScoreVector value_;
};

/// Encodes a `/score` request body.
inline std::string score_request_body(const std::vector<std::string>& texts) {
  return nlohmann::json{{"texts", texts}}.dump();
}

/// Decodes a `/score` response; throws SchemaViolation on any contract breach.
inline std::vector<std::optional<StrategyScoreVector>> parse_score_response(const std::string& body,
                                                                            std::size_t expected) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
    throw Error(ErrorKind::SchemaViolation, "score response lacks a 'scores' array");
  }
  const auto& arr = j["scores"];
  if (arr.size() != expected) {
    throw Error(ErrorKind::SchemaViolation,
                "expected " + std::to_string(expected) + " score vectors, got " + std::to_string(arr.size()));
  }
  std::vector<std::optional<StrategyScoreVector>> out;
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 4) throw Error(ErrorKind::SchemaViolation, "score vector must have 4 numbers");
    std::array<double, 4> x{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!v[k].is_number()) throw Error(ErrorKind::SchemaViolation, "non-numeric score");
      x[k] = v[k].get<double>();
      if (!(x[k] >= 0.0 && x[k] <= 1.0)) throw Error(ErrorKind::SchemaViolation, "score outside [0,1]");
    }
    out.emplace_back(StrategyScoreVector(x[0], x[1], x[2], x[3]));
  }
  return out;
}

struct ScoreReport {
  std::size_t total = 0;
  std::size_t scored = 0;
  std::vector<std::size_t> missing;  // indices into the argument list

  double missing_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(missing.size()) / static_cast<double>(total);
  }
};

struct ScoreOptions {
  std::size_t batch_size = 32;
  int attempts = 2;              // per batch and per single-item fallback
  double max_missing = 0.10;     // above this the run fails
  std::size_t workers = 1;
};

namespace detail {

inline std::optional<std::vector<std::optional<StrategyScoreVector>>> try_score(Scorer& scorer,
                                                                               const std::vector<std::string>& texts,
                                                                               int attempts) {
  for (int a = 0; a < attempts; ++a) {
    try {
      auto out = scorer.score(texts);
      if (out.size() == texts.size()) return out;
      warn("scorer returned " + std::to_string(out.size()) + " results for " + std::to_string(texts.size()));
    } catch (const std::exception& e) {
      warn(std::string("scorer failure: ") + e.what());
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Fills `args[i].scores`. A failed batch is retried, then its items are
/// scored one by one; items that still fail stay missing.
inline ScoreReport score_corpus(std::vector<AnalysisArgument>& args, Scorer& scorer, const ScoreOptions& opt = {}) {
  ScoreReport report;
  report.total = args.size();
  const std::size_t batch = std::max<std::size_t>(1, opt.batch_size);
  const std::size_t n_batches = (args.size() + batch - 1) / batch;

  auto run_batch = [&](std::size_t b) {
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(args.size(), lo + batch);
    std::vector<std::string> texts;
    for (std::size_t i = lo; i < hi; ++i) texts.push_back(args[i].text);
    auto result = detail::try_score(scorer, texts, opt.attempts);
    for (std::size_t i = lo; i < hi; ++i) {
      if (result && (*result)[i - lo]) {
        args[i].scores = (*result)[i - lo];
        continue;
      }
      auto single = detail::try_score(scorer, {args[i].text}, opt.attempts);
      if (single && single->front()) args[i].scores = single->front();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(opt.workers, 1, std::max<std::size_t>(1, n_batches));
  if (workers == 1) {
    for (std::size_t b = 0; b < n_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_batches; b = next++) run_batch(b);
      });
    }
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].scores) {
      ++report.scored;
    } else {
      report.missing.push_back(i);
    }
  }
  if (report.missing_fraction() > opt.max_missing) {
    throw Error(ErrorKind::ScorerUnavailable, std::to_string(report.missing.size()) + " of " +
                                                  std::to_string(report.total) + " arguments could not be scored");
  }
  return report;
}

inline nlohmann::ordered_json to_json(const ScoreReport& r) {
  return {{"total", r.total}, {"scored", r.scored}, {"missing", r.missing.size()}, {"missing_indices", r.missing}};
}

// ---------------------------------------------------------------------------
// Statistics

/// Affective minus cognitive: (emotional + moral)/2 - (causal + empirical)/2.
inline double affect_gap(const StrategyScoreVector& s) {
  return (s.emotional() + s.moral()) / 2.0 - (s.causal() + s.empirical()) / 2.0;
}

struct TrendResult {
  double slope = 0.0;
  double stderr_ = 0.0;
  double t = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// OLS of value on year, two-sided p from the t distribution with n-2 df.
inline TrendResult ols_trend(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 3) throw Error(ErrorKind::DegenerateInput, "trend needs >= 3 points");
  int y0 = points.front().first;
  int y1 = y0;
  for (const auto& [year, _] : points) {
    y0 = std::min(y0, year);
    y1 = std::max(y1, year);
  }
  if (y0 == y1) throw Error(ErrorKind::DegenerateInput, "trend needs >= 2 distinct years");

  // Years are centred on their minimum so a constant shift leaves every x unchanged.
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [year, v] : points) {
    sx += static_cast<double>(year - y0);
    sy += v;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [year, v] : points) {
    const double dx = static_cast<double>(year - y0) - mx;
    sxx += dx * dx;
    sxy += dx * (v - my);
  }
  TrendResult r;
  r.n = points.size();
  r.slope = sxy / sxx;
  double sse = 0.0;
  for (const auto& [year, v] : points) {
    const double e = v - my - r.slope * (static_cast<double>(year - y0) - mx);
    sse += e * e;
  }
  r.stderr_ = std::sqrt(sse / (n - 2.0) / sxx);
  if (r.stderr_ == 0.0 || r.slope == 0.0) {
    r.t = r.slope == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.slope);
    r.p = r.slope == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = r.slope / r.stderr_;
  r.p = stats::t_two_sided_p(r.t, n - 2.0);
  return r;
}

inline nlohmann::ordered_json to_json(const TrendResult& r) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  return {{"slope_per_year", r.slope}, {"stderr", r.stderr_}, {"t", finite(r.t)}, {"p", r.p}, {"n", r.n}};
}

/// Argument-level (year, affect_gap) points of every scored argument.
inline std::vector<std::pair<int, double>> affect_gap_points(const std::vector<AnalysisArgument>& args) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& a : args) {
    if (a.scores) pts.emplace_back(a.year, affect_gap(*a.scores));
  }
  return pts;
}

struct PartyContrast {
  std::size_t n_dem = 0;
  std::size_t n_rep = 0;
  double mean_dem = 0.0;
  double mean_rep = 0.0;
  metrics::TTestResult test;  // mean_diff = Democrat - Republican
};

struct WithinPartyContrast {
  std::string party;  // "Democrat", "Republican" or "All"
  std::size_t n = 0;
  metrics::TTestResult test;  // emotional - empirical, paired per argument
};

struct YearContrast {
  int year = 0;
  PerStrategy<std::optional<PartyContrast>> strategies;
};

struct PartisanReport {
  PerStrategy<PartyContrast> strategies;
  std::vector<WithinPartyContrast> within;
  std::vector<YearContrast> by_year;
};

namespace detail {

/// Welch test that also covers two constant groups: equal means give t = 0,
/// p = 1; different means give an infinite t and p = 0.
inline metrics::TTestResult welch_total(std::span<const double> a, std::span<const double> b) {
  const double v = stats::sample_variance(a) + stats::sample_variance(b);
  if (v > 0.0) return metrics::welch_t_test(a, b);
  metrics::TTestResult r;
  r.mean_diff = stats::mean(a) - stats::mean(b);
  r.df = static_cast<double>(a.size() + b.size()) - 2.0;
  r.t = r.mean_diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
  r.p = r.mean_diff == 0.0 ? 1.0 : 0.0;
  return r;
}

inline PartyContrast contrast(const std::vector<const AnalysisArgument*>& args, StrategyKind s) {
  std::vector<double> dem, rep;
  for (const auto* a : args) (a->party == Party::Democrat ? dem : rep).push_back((*a->scores)[s]);
  PartyContrast c;
  c.n_dem = dem.size();
  c.n_rep = rep.size();
  c.mean_dem = stats::mean(dem);
  c.mean_rep = stats::mean(rep);
  c.test = welch_total(dem, rep);
  c.test.mean_diff = c.mean_dem - c.mean_rep;
  return c;
}

}  // namespace detail

/// Democrat-minus-Republican Welch tests per strategy over scored arguments,
/// paired emotional-vs-empirical contrasts within each party, and the same
/// party tests per election year where both parties have >= 2 arguments.
inline PartisanReport partisan_report(const std::vector<AnalysisArgument>& args) {
  std::vector<const AnalysisArgument*> scored;
  std::size_t n_dem = 0, n_rep = 0;
  for (const auto& a : args) {
    if (!a.scores) continue;
    scored.push_back(&a);
    (a.party == Party::Democrat ? n_dem : n_rep)++;
  }
  if (n_dem < 2 || n_rep < 2) {
    throw Error(ErrorKind::MissingParty, "need >= 2 scored arguments per party, got Democrat " + std::to_string(n_dem) +
                                             ", Republican " + std::to_string(n_rep));
  }
  PartisanReport rep;
  for (auto s : kAllStrategies) rep.strategies[s] = detail::contrast(scored, s);

  for (const char* party : {"Democrat", "Republican", "All"}) {
    std::vector<double> em, emp;
    for (const auto* a : scored) {
      if (std::string_view(party) != "All" && to_string(a->party) != party) continue;
      em.push_back(a->scores->emotional());
      emp.push_back(a->scores->empirical());
    }
    rep.within.push_back({party, em.size(), metrics::paired_t_test(em, emp)});
  }

  std::map<int, std::vector<const AnalysisArgument*>> years;
  for (const auto* a : scored) years[a->year].push_back(a);
  for (const auto& [year, list] : years) {
    std::size_t d = 0, r = 0;
    for (const auto* a : list) (a->party == Party::Democrat ? d : r)++;
    YearContrast yc;
    yc.year = year;
    if (d >= 2 && r >= 2) {
      for (auto s : kAllStrategies) yc.strategies[s] = detail::contrast(list, s);
    }
    rep.by_year.push_back(std::move(yc));
  }
  return rep;
}

inline nlohmann::ordered_json to_json(const PartyContrast& c) {
  return {{"n_democrat", c.n_dem},
          {"n_republican", c.n_rep},
          {"mean_democrat", c.mean_dem},
          {"mean_republican", c.mean_rep},
          {"delta_dem_minus_rep", c.test.mean_diff},
          {"test", metrics::to_json(c.test)}};
}

inline nlohmann::ordered_json to_json(const PartisanReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json strategies;
  for (auto s : kAllStrategies) strategies[std::string(to_string(s))] = to_json(r.strategies[s]);
  j["strategies"] = strategies;
  nlohmann::ordered_json within = nlohmann::ordered_json::array();
  for (const auto& w : r.within) {
    within.push_back({{"party", w.party}, {"n", w.n}, {"emotional_minus_empirical", metrics::to_json(w.test)}});
  }
  j["within_party"] = within;
  nlohmann::ordered_json years = nlohmann::ordered_json::array();
  for (const auto& y : r.by_year) {
    nlohmann::ordered_json row;
    row["year"] = y.year;
    for (auto s : kAllStrategies) {
      row[std::string(to_string(s))] = y.strategies[s] ? to_json(*y.strategies[s]) : nlohmann::ordered_json(nullptr);
    }
    years.push_back(row);
  }
  j["by_year"] = years;
  return j;
}

// ---------------------------------------------------------------------------
// Plot data

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

/// Mean and CI95 half-width cells; the CI cell is empty when n < 2.
inline std::string mean_ci_cells(const std::vector<double>& xs) {
  std::string out = fixed6(stats::mean(xs)) + ",";
  if (xs.size() >= 2) out += fixed6(stats::ci95_half_width(xs));
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IO, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IO, "write failed for " + path.string());
}

}  // namespace detail

inline std::string trend_csv_header() {
  std::string h = "year,n";
  for (auto s : kAllStrategies) {
    h += "," + std::string(to_string(s)) + "_mean," + std::string(to_string(s)) + "_ci95";
  }
  return h + ",affect_gap_affective_minus_cognitive_mean\n";
}

inline std::string partisan_csv_header() { return "strategy,party,n,mean,ci95\n"; }

/// Per-year strategy means with CI95 half-widths and the mean affect gap.
inline std::string trend_csv(const std::vector<AnalysisArgument>& args) {
  std::map<int, std::vector<const AnalysisArgument*>> years;
  for (const auto& a : args) {
    if (a.scores) years[a.year].push_back(&a);
  }
  std::string out = trend_csv_header();
  for (const auto& [year, list] : years) {
    out += std::to_string(year) + "," + std::to_string(list.size());
    for (auto s : kAllStrategies) {
      std::vector<double> xs;
      for (const auto* a : list) xs.push_back((*a->scores)[s]);
      out += "," + detail::mean_ci_cells(xs);
    }
    std::vector<double> gap;
    for (const auto* a : list) gap.push_back(affect_gap(*a->scores));
    out += "," + detail::fixed6(stats::mean(gap)) + "\n";
  }
  return out;
}

/// Per-strategy, per-party means with CI95 half-widths.
inline std::string partisan_csv(const std::vector<AnalysisArgument>& args) {
  std::string out = partisan_csv_header();
  for (auto s : kAllStrategies) {
    for (auto party : {Party::Democrat, Party::Republican}) {
      std::vector<double> xs;
      for (const auto& a : args) {
        if (a.scores && a.party == party) xs.push_back((*a.scores)[s]);
      }
      if (xs.empty()) continue;
      out += std::string(to_string(s)) + "," + std::string(to_string(party)) + "," + std::to_string(xs.size()) + "," +
             detail::mean_ci_cells(xs) + "\n";
    }
  }
  return out;
}

/// Writes trend.csv and partisan.csv into `dir`; returns their paths.
inline std::vector<std::string> emit_plot_data(const std::vector<AnalysisArgument>& args, const std::string& dir) {
  const auto trend = std::filesystem::path(dir) / "trend.csv";
  const auto partisan = std::filesystem::path(dir) / "partisan.csv";
  detail::write_text(trend, trend_csv(args));
  detail::write_text(partisan, partisan_csv(args));
  return {trend.string(), partisan.string()};
}

}  // namespace rhetoric
