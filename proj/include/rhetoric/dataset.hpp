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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhetoric/annotation.hpp"
#include "rhetoric/debate.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/jsonl.hpp"
#include "rhetoric/random.hpp"
#include "rhetoric/stances.hpp"
#include "rhetoric/strategy.hpp"

namespace rhetoric {

enum class Split { Train, Val, TestInDomain, TestOOD, TestCrossDomain };

inline constexpr std::array<Split, 5> kAllSplits = {Split::Train, Split::Val, Split::TestInDomain, Split::TestOOD,
                                                    Split::TestCrossDomain};

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::TestInDomain: return "test_in_domain";
    case Split::TestOOD: return "test_ood";
    case Split::TestCrossDomain: return "test_cross_domain";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  for (auto k : kAllSplits) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown split '" + std::string(s) + "'");
}

struct ArgumentRecord {
  std::string utterance_id;
  std::string topic_id;
  bool is_political = true;
  StrategyKind strategy = StrategyKind::Causal;
  Condition condition = Condition::Use;
  std::string text;
  StrategyScoreVector scores;
  std::optional<Split> split;
  /// Fields this version does not know about, kept for round trips.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  void assign(Split s) {
    if (split && *split != s) {
      throw Error(ErrorKind::InvalidArgument, utterance_id + " already assigned to " + std::string(to_string(*split)));
    }
    split = s;
  }
};

inline nlohmann::ordered_json to_json(const ArgumentRecord& r) {
  nlohmann::ordered_json j;
  j["utterance_id"] = r.utterance_id;
  j["topic_id"] = r.topic_id;
  j["is_political"] = r.is_political;
  j["strategy"] = std::string(to_string(r.strategy));
  j["condition"] = std::string(to_string(r.condition));
  j["text"] = r.text;
  j["scores"] = to_json(r.scores);
  j["split"] = r.split ? nlohmann::ordered_json(std::string(to_string(*r.split))) : nlohmann::ordered_json(nullptr);
  for (auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

inline ArgumentRecord record_from_json(const nlohmann::ordered_json& j) {
  static const std::set<std::string> known = {"utterance_id", "topic_id", "is_political", "strategy",
                                              "condition",    "text",     "scores",       "split"};
  ArgumentRecord r;
  r.utterance_id = j.at("utterance_id").get<std::string>();
  r.topic_id = j.at("topic_id").get<std::string>();
  r.is_political = j.at("is_political").get<bool>();
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.condition = parse_condition(j.at("condition").get<std::string>());
  r.text = j.at("text").get<std::string>();
  r.scores = scores_from_json(j.at("scores"));
  if (j.contains("split") && !j.at("split").is_null()) r.split = parse_split(j.at("split").get<std::string>());
  for (auto& [k, v] : j.items()) {
    if (!known.count(k)) r.extra[k] = v;
  }
  return r;
}

inline void write_jsonl(const std::vector<ArgumentRecord>& records, const std::string& path) {
  std::vector<nlohmann::ordered_json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  jsonl::write(path, lines);
}

inline std::vector<ArgumentRecord> read_jsonl(const std::string& path) {
  std::vector<ArgumentRecord> out;
  jsonl::read(path, [&](const nlohmann::ordered_json& j, std::size_t) { out.push_back(record_from_json(j)); });
  return out;
}

// ---------------------------------------------------------------------------
// Splits

enum class SplitMode { Random811, TopicTransfer };

inline std::string_view to_string(SplitMode m) { return m == SplitMode::Random811 ? "random_811" : "topic_transfer"; }

/// Top-level topic buckets of the topic-transfer split.
inline constexpr const char* kInDomain = "in_domain";
inline constexpr const char* kOutOfDistribution = "ood";
inline constexpr const char* kCrossDomain = "cross_domain";

struct SplitPlan {
  SplitMode mode = SplitMode::Random811;
  std::uint64_t seed = 0;
  std::array<int, 3> ratios = {8, 1, 1};
  std::map<std::string, Split> assignment;        // utterance_id -> bucket
  std::map<std::string, std::string> topic_buckets;  // topic-transfer only

  std::map<Split, std::size_t> counts() const {
    std::map<Split, std::size_t> c;
    for (auto s : kAllSplits) c[s] = 0;
    for (const auto& [_, s] : assignment) ++c[s];
    return c;
  }

  /// Writes each record's bucket; records the plan does not cover are left unassigned.
  void apply(std::vector<ArgumentRecord>& records) const {
    for (auto& r : records) {
      if (auto it = assignment.find(r.utterance_id); it != assignment.end()) r.assign(it->second);
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(mode));
    j["seed"] = seed;
    j["ratios"] = ratios;
    nlohmann::ordered_json c;
    for (const auto& [s, n] : counts()) c[std::string(to_string(s))] = n;
    j["counts"] = c;
    j["topic_buckets"] = topic_buckets;
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (const auto& [id, s] : assignment) a[id] = std::string(to_string(s));
    j["assignment"] = a;
    return j;
  }

  static SplitPlan from_json(const nlohmann::json& j) {
    SplitPlan p;
    p.mode = j.at("mode").get<std::string>() == "topic_transfer" ? SplitMode::TopicTransfer : SplitMode::Random811;
    p.seed = j.at("seed").get<std::uint64_t>();
    p.ratios = j.at("ratios").get<std::array<int, 3>>();
    p.topic_buckets = j.at("topic_buckets").get<std::map<std::string, std::string>>();
    for (auto& [id, s] : j.at("assignment").items()) p.assignment[id] = parse_split(s.get<std::string>());
    return p;
  }
};

namespace detail {

inline void check_unique_ids(const std::vector<const ArgumentRecord*>& records) {
  std::set<std::string> seen;
  for (const auto* r : records) {
    if (!seen.insert(r->utterance_id).second) {
      throw Error(ErrorKind::SchemaViolation, "duplicate utterance_id " + r->utterance_id);
    }
  }
}

/// Shuffles `records` with `rng` and deals them into train/val/test; val
/// and test get floor(n * ratio / total), train takes the remainder.
inline void deal_811(const std::vector<const ArgumentRecord*>& records, Rng& rng, const std::array<int, 3>& ratios,
                     Split test_bucket, std::map<std::string, Split>& out) {
  const auto n = records.size();
  const auto total = static_cast<std::size_t>(ratios[0] + ratios[1] + ratios[2]);
  if (n < total) throw Error(ErrorKind::TooFewRecords, std::to_string(n) + " records, need " + std::to_string(total));
  const std::size_t n_val = n * static_cast<std::size_t>(ratios[1]) / total;
  const std::size_t n_test = n * static_cast<std::size_t>(ratios[2]) / total;
  const std::size_t n_train = n - n_val - n_test;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t k = 0; k < n; ++k) {
    const Split s = k < n_train ? Split::Train : (k < n_train + n_val ? Split::Val : test_bucket);
    out[records[order[k]]->utterance_id] = s;
  }
}

}  // namespace detail

/// Random train/val/test split of all records (default 8/1/1).
inline SplitPlan split_random(const std::vector<ArgumentRecord>& records, std::uint64_t seed,
                              std::array<int, 3> ratios = {8, 1, 1}) {
  if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0 || ratios[0] + ratios[1] + ratios[2] == 0) {
    throw Error(ErrorKind::InvalidArgument, "split ratios must be non-negative with a positive total");
  }
  std::vector<const ArgumentRecord*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  detail::check_unique_ids(ptrs);
  SplitPlan plan;
  plan.mode = SplitMode::Random811;
  plan.seed = seed;
  plan.ratios = ratios;
  Rng rng(seed);
  detail::deal_811(ptrs, rng, ratios, Split::TestInDomain, plan.assignment);
  return plan;
}

/// Topic-level transfer split: `n_train_political` sampled political topics
/// are dealt 8/1/1 into train/val/test_in_domain, the other political topics
/// form test_ood and every non-political topic test_cross_domain.
inline SplitPlan split_topic_transfer(const std::vector<ArgumentRecord>& records, std::size_t n_train_political,
                                      std::uint64_t seed) {
  std::vector<const ArgumentRecord*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  detail::check_unique_ids(ptrs);

  std::map<std::string, bool> political;  // sorted by topic_id for determinism
  for (const auto& r : records) {
    auto [it, inserted] = political.emplace(r.topic_id, r.is_political);
    if (!inserted && it->second != r.is_political) {
      throw Error(ErrorKind::SchemaViolation, "topic " + r.topic_id + " has inconsistent is_political");
    }
  }
  std::vector<std::string> political_topics;
  for (const auto& [t, p] : political) {
    if (p) political_topics.push_back(t);
  }
  if (political_topics.size() < n_train_political) {
    throw Error(ErrorKind::InsufficientPoliticalTopics, std::to_string(political_topics.size()) + " political topics, need " +
                                                            std::to_string(n_train_political));
  }
  Rng rng(seed);
  rng.shuffle(political_topics);

  SplitPlan plan;
  plan.mode = SplitMode::TopicTransfer;
  plan.seed = seed;
  for (const auto& [t, p] : political) plan.topic_buckets[t] = p ? kOutOfDistribution : kCrossDomain;
  for (std::size_t i = 0; i < n_train_political; ++i) plan.topic_buckets[political_topics[i]] = kInDomain;

  std::vector<const ArgumentRecord*> in_domain;
  for (const auto* r : ptrs) {
    const auto& bucket = plan.topic_buckets.at(r->topic_id);
    if (bucket == kInDomain) {
      in_domain.push_back(r);
    } else {
      plan.assignment[r->utterance_id] = bucket == kOutOfDistribution ? Split::TestOOD : Split::TestCrossDomain;
    }
  }
  detail::deal_811(in_domain, rng, plan.ratios, Split::TestInDomain, plan.assignment);
  return plan;
}

// ---------------------------------------------------------------------------
// Corpus assembly and export

struct CorpusBuild {
  std::vector<ArgumentRecord> records;
  /// Utterances left out because fewer than min_raters ratings were valid.
  std::vector<std::string> excluded;
};

/// Joins debates.jsonl rows with scores.jsonl and the stance file's
/// political labels. Rows without an aggregate score are excluded.
inline CorpusBuild build_corpus(const std::vector<UtteranceRow>& debates, const std::vector<ScoreRecord>& scores,
                                const std::vector<StancePair>& stances) {
  std::map<std::string, const ScoreRecord*> by_id;
  for (const auto& s : scores) by_id[s.utterance_id] = &s;
  std::map<std::string, bool> political;
  for (const auto& s : stances) political[s.topic_id] = s.is_political.value_or(true);
  CorpusBuild out;
  for (const auto& row : debates) {
    auto it = by_id.find(row.utterance.utterance_id);
    if (it == by_id.end() || !it->second->scores) {
      out.excluded.push_back(row.utterance.utterance_id);
      continue;
    }
    ArgumentRecord r;
    r.utterance_id = row.utterance.utterance_id;
    r.topic_id = row.topic_id;
    auto p = political.find(row.topic_id);
    if (p == political.end()) throw Error(ErrorKind::SchemaViolation, "no stance record for topic " + row.topic_id);
    r.is_political = p->second;
    r.strategy = row.strategy;
    r.condition = row.condition;
    r.text = row.utterance.text;
    r.scores = *it->second->scores;
    out.records.push_back(std::move(r));
  }
  return out;
}

/// Writes `<split>.jsonl` for every bucket (train.jsonl, val.jsonl,
/// test_in_domain.jsonl, ...); returns the written paths.
inline std::vector<std::string> export_training(const std::vector<ArgumentRecord>& records, const std::string& out_dir) {
  std::map<Split, std::vector<ArgumentRecord>> buckets;
  for (auto s : kAllSplits) buckets[s];
  for (const auto& r : records) {
    if (r.split) buckets[*r.split].push_back(r);
  }
  std::vector<std::string> paths;
  for (const auto& [s, recs] : buckets) {
    const auto path = (std::filesystem::path(out_dir) / (std::string(to_string(s)) + ".jsonl")).string();
    write_jsonl(recs, path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rhetoric
