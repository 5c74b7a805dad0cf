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

#include <atomic>
#include <charconv>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rhetoric/error.hpp"
#include "rhetoric/gateway.hpp"
#include "rhetoric/log.hpp"
#include "rhetoric/persona.hpp"
#include "rhetoric/prompts.hpp"
#include "rhetoric/strategy.hpp"
#include "rhetoric/strategy_guide.hpp"

namespace rhetoric {

/// Maps a 1..5 Likert rating onto [0, 1]: 1 -> 0, 3 -> 0.5, 5 -> 1.
inline double normalize_likert(int x) {
  if (x < 1 || x > 5) throw Error(ErrorKind::OutOfRange, "Likert value " + std::to_string(x));
  return (x - 1) / 4.0;
}

/// Parses "causal=4 empirical=2 emotional=1 moral=5" (any order, any
/// separators, case-insensitive names). Every strategy must appear.
inline LikertVector parse_likert_reply(const std::string& reply) {
  static const std::regex kPair(R"(\b(causal|empirical|emotional|moral)\s*[=:]\s*(-?\d+))", std::regex::icase);
  std::array<std::optional<int>, 4> seen;
  for (auto it = std::sregex_iterator(reply.begin(), reply.end(), kPair); it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1];
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto k = parse_strategy(name);
    int value = 0;
    try {
      value = std::stoi((*it)[2]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseFailure, "unreadable rating in '" + reply + "'");
    }
    if (value < 1 || value > 5) {
      throw Error(ErrorKind::ParseFailure, name + "=" + std::to_string(value) + " is outside 1..5");
    }
    if (!seen[index_of(k)]) seen[index_of(k)] = value;
  }
  for (auto k : kAllStrategies) {
    if (!seen[index_of(k)]) throw Error(ErrorKind::ParseFailure, "no rating for " + std::string(to_string(k)));
  }
  return LikertVector(*seen[0], *seen[1], *seen[2], *seen[3]);
}

inline ChatRequest annotation_request(const std::string& text, const Persona& persona, Gateway& gw,
                                      const StrategyGuide& guide) {
  return gw.prompt(prompts::kAnnotate,
                   {{"persona", persona.describe()}, {"few_shot", guide.few_shot_block()}, {"argument", text}},
                   /*judge=*/true);
}

/// One persona's ratings for one argument; std::nullopt marks a missing
/// cell (two unparseable replies).
inline std::optional<LikertVector> score_argument(const std::string& text, const Persona& persona, Gateway& gw,
                                                  const StrategyGuide& guide = StrategyGuide::builtin()) {
  if (text.empty()) throw Error(ErrorKind::InvalidArgument, "cannot score an empty argument");
  try {
    return ask_parsed(gw, annotation_request(text, persona, gw, guide), parse_likert_reply, prompts::kLikertHint);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseFailure) throw;
    warn(std::string("annotation cell missing: ") + e.what());
    return std::nullopt;
  }
}

/// Per-strategy mean of normalized ratings.
inline StrategyScoreVector aggregate_scores(const std::vector<LikertVector>& vectors, std::size_t min_raters) {
  if (vectors.size() < min_raters || vectors.empty()) {
    throw Error(ErrorKind::TooFewRaters,
                std::to_string(vectors.size()) + " raters, need " + std::to_string(std::max<std::size_t>(min_raters, 1)));
  }
  StrategyScoreVector out;
  for (auto k : kAllStrategies) {
    double sum = 0.0;
    for (const auto& v : vectors) sum += normalize_likert(v[k]);
    out[k] = sum / static_cast<double>(vectors.size());
  }
  return out;
}

struct ScoreRecord {
  std::string utterance_id;
  /// Indexed by persona; nullopt for a missing cell.
  std::vector<std::optional<LikertVector>> ratings;
  /// Absent when fewer than min_raters cells are valid.
  std::optional<StrategyScoreVector> scores;

  std::size_t valid_raters() const {
    std::size_t n = 0;
    for (const auto& r : ratings) n += r.has_value();
    return n;
  }
};

struct ArgumentText {
  std::string utterance_id;
  std::string text;
};

/// Rates every argument with every persona of the panel. Calls may run on
/// `workers` threads; output order follows `arguments`.
inline std::vector<ScoreRecord> annotate_corpus(const std::vector<ArgumentText>& arguments,
                                                const std::vector<Persona>& panel, Gateway& gw,
                                                std::size_t min_raters, int workers = 1,
                                                const StrategyGuide& guide = StrategyGuide::builtin()) {
  const std::size_t cells = arguments.size() * panel.size();
  std::vector<std::optional<LikertVector>> results(cells);
  std::vector<std::string> errors(cells);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const auto& arg = arguments[i / panel.size()];
      try {
        results[i] = score_argument(arg.text, panel[i % panel.size()], gw, guide);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(cells, 1))));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
  }
  std::vector<ScoreRecord> out;
  out.reserve(arguments.size());
  for (std::size_t a = 0; a < arguments.size(); ++a) {
    ScoreRecord rec;
    rec.utterance_id = arguments[a].utterance_id;
    std::vector<LikertVector> valid;
    for (std::size_t p = 0; p < panel.size(); ++p) {
      const auto i = a * panel.size() + p;
      if (!errors[i].empty()) warn(rec.utterance_id + " persona " + std::to_string(p) + ": " + errors[i]);
      rec.ratings.push_back(results[i]);
      if (results[i]) valid.push_back(*results[i]);
    }
    if (valid.size() >= min_raters && !valid.empty()) rec.scores = aggregate_scores(valid, min_raters);
    out.push_back(std::move(rec));
  }
  return out;
}

inline nlohmann::ordered_json to_json(const LikertVector& v) {
  nlohmann::ordered_json j;
  for (auto k : kAllStrategies) j[std::string(to_string(k))] = v[k];
  return j;
}

inline nlohmann::ordered_json to_json(const StrategyScoreVector& v) {
  nlohmann::ordered_json j;
  for (auto k : kAllStrategies) j[std::string(to_string(k))] = v[k];
  return j;
}

inline LikertVector likert_from_json(const nlohmann::json& j) {
  return LikertVector(j.at("causal").get<int>(), j.at("empirical").get<int>(), j.at("emotional").get<int>(),
                      j.at("moral").get<int>());
}

inline StrategyScoreVector scores_from_json(const nlohmann::json& j) {
  return StrategyScoreVector(j.at("causal").get<double>(), j.at("empirical").get<double>(),
                             j.at("emotional").get<double>(), j.at("moral").get<double>());
}

/// scores.jsonl line: ratings keyed by persona index (null = missing cell).
inline nlohmann::ordered_json to_json(const ScoreRecord& r) {
  nlohmann::ordered_json j;
  j["utterance_id"] = r.utterance_id;
  nlohmann::ordered_json ratings = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < r.ratings.size(); ++p) {
    ratings[std::to_string(p)] = r.ratings[p] ? to_json(*r.ratings[p]) : nlohmann::ordered_json(nullptr);
  }
  j["ratings"] = std::move(ratings);
  j["valid_raters"] = r.valid_raters();
  j["scores"] = r.scores ? to_json(*r.scores) : nlohmann::ordered_json(nullptr);
  return j;
}

inline ScoreRecord score_record_from_json(const nlohmann::json& j) {
  ScoreRecord r;
  r.utterance_id = j.at("utterance_id").get<std::string>();
  const auto& ratings = j.at("ratings");
  r.ratings.resize(ratings.size());
  for (auto& [key, value] : ratings.items()) {
    std::size_t p = 0;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), p);
    if (ec != std::errc() || end != key.data() + key.size() || p >= r.ratings.size()) {
      throw Error(ErrorKind::SchemaViolation, "persona index '" + key + "'");
    }
    if (!value.is_null()) r.ratings[p] = likert_from_json(value);
  }
  if (!j.at("scores").is_null()) r.scores = scores_from_json(j.at("scores"));
  return r;
}

}  // namespace rhetoric
