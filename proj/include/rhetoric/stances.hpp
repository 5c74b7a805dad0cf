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
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhetoric/csv.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/gateway.hpp"
#include "rhetoric/prompts.hpp"

namespace rhetoric {

struct TopicKeyword {
  std::string topic_id;
  std::string text;
  std::vector<bool> controversy_votes;  // in annotator order
  std::vector<bool> political_votes;
};

struct StancePair {
  std::string topic_id;
  std::string stance_pro;
  std::string stance_con;
  // Carried along so later stages need only stances.jsonl.
  std::string topic_text;
  std::optional<bool> is_political;

  friend bool operator==(const StancePair&, const StancePair&) = default;
};

inline bool parse_vote(std::string v) {
  const auto first = v.find_first_not_of(" \t\r");
  v = first == std::string::npos ? "" : v.substr(first, v.find_last_not_of(" \t\r") - first + 1);
  for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "yes" || v == "y" || v == "1" || v == "true") return true;
  if (v == "no" || v == "n" || v == "0" || v == "false") return false;
  throw Error(ErrorKind::SchemaViolation, "unrecognized vote '" + v + "'");
}

/// Joins `topics.csv` (topic_id,text) with vote files (topic_id,annotator_id,vote).
/// Votes keep file order; topics keep topics.csv order.
inline std::vector<TopicKeyword> load_topics(const std::string& topics_csv, const std::string& controversy_csv,
                                             const std::string& political_csv = "") {
  auto topics = csv::Table::from_file(topics_csv);
  std::vector<TopicKeyword> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < topics.size(); ++r) {
    TopicKeyword t{topics.at(r, "topic_id"), topics.at(r, "text"), {}, {}};
    if (t.text.empty()) throw Error(ErrorKind::SchemaViolation, "empty text for topic " + t.topic_id);
    if (!index.emplace(t.topic_id, out.size()).second) {
      throw Error(ErrorKind::SchemaViolation, "duplicate topic_id " + t.topic_id);
    }
    out.push_back(std::move(t));
  }
  auto attach = [&](const std::string& path, std::vector<bool> TopicKeyword::*votes) {
    auto table = csv::Table::from_file(path);
    for (std::size_t r = 0; r < table.size(); ++r) {
      const auto& id = table.at(r, "topic_id");
      auto it = index.find(id);
      if (it == index.end()) throw Error(ErrorKind::SchemaViolation, path + ": unknown topic_id " + id);
      (out[it->second].*votes).push_back(parse_vote(table.at(r, "vote")));
    }
  };
  attach(controversy_csv, &TopicKeyword::controversy_votes);
  if (!political_csv.empty()) attach(political_csv, &TopicKeyword::political_votes);
  return out;
}

/// Keeps topics whose first two controversy votes are both "yes".
inline std::vector<TopicKeyword> filter_controversial(const std::vector<TopicKeyword>& topics) {
  std::vector<TopicKeyword> kept;
  for (const auto& t : topics) {
    if (t.controversy_votes.size() < 2) throw Error(ErrorKind::InsufficientVotes, t.topic_id);
    if (t.controversy_votes[0] && t.controversy_votes[1]) kept.push_back(t);
  }
  return kept;
}

/// Two annotators decide; a third vote breaks a disagreement.
inline bool label_political(const TopicKeyword& topic) {
  const auto& v = topic.political_votes;
  if (v.size() < 2) throw Error(ErrorKind::InsufficientVotes, topic.topic_id);
  if (v[0] == v[1]) return v[0];
  if (v.size() < 3) throw Error(ErrorKind::MissingTiebreaker, topic.topic_id);
  return v[2];
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

/// Reads the `STANCE_1:` / `STANCE_2:` lines of a stance-generation reply.
inline std::pair<std::string, std::string> parse_stance_reply(std::string_view reply) {
  std::string first, second;
  std::size_t pos = 0;
  while (pos <= reply.size()) {
    auto end = reply.find('\n', pos);
    if (end == std::string_view::npos) end = reply.size();
    auto line = detail::trim(reply.substr(pos, end - pos));
    auto take = [&](std::string_view prefix, std::string& dst) {
      if (line.size() >= prefix.size()) {
        std::string head = line.substr(0, prefix.size());
        for (auto& c : head) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (head == prefix && dst.empty()) dst = detail::trim(std::string_view(line).substr(prefix.size()));
      }
    };
    take("STANCE_1:", first);
    take("STANCE_2:", second);
    pos = end + 1;
  }
  if (first.empty() || second.empty()) throw Error(ErrorKind::ParseFailure, "missing STANCE_1 or STANCE_2 line");
  if (first == second) throw Error(ErrorKind::ParseFailure, "stances are identical");
  return {first, second};
}

inline StancePair generate_stance_pair(const TopicKeyword& topic, Gateway& gw) {
  auto req = gw.prompt(prompts::kStanceGeneration, {{"topic", topic.text}}, /*judge=*/false);
  auto [pro, con] = ask_parsed(gw, req, parse_stance_reply, prompts::kStanceHint);
  StancePair p{topic.topic_id, std::move(pro), std::move(con), topic.text, std::nullopt};
  if (!topic.political_votes.empty()) p.is_political = label_political(topic);
  return p;
}

inline nlohmann::ordered_json to_json(const StancePair& p) {
  nlohmann::ordered_json j;
  j["topic_id"] = p.topic_id;
  j["stance_pro"] = p.stance_pro;
  j["stance_con"] = p.stance_con;
  j["topic_text"] = p.topic_text;
  if (p.is_political) j["is_political"] = *p.is_political;
  return j;
}

inline StancePair stance_from_json(const nlohmann::json& j) {
  StancePair p;
  p.topic_id = j.at("topic_id").get<std::string>();
  p.stance_pro = j.at("stance_pro").get<std::string>();
  p.stance_con = j.at("stance_con").get<std::string>();
  p.topic_text = j.value("topic_text", p.topic_id);
  if (j.contains("is_political")) p.is_political = j.at("is_political").get<bool>();
  if (p.stance_pro.empty() || p.stance_con.empty() || p.stance_pro == p.stance_con) {
    throw Error(ErrorKind::SchemaViolation, "invalid stances for " + p.topic_id);
  }
  return p;
}

}  // namespace rhetoric
