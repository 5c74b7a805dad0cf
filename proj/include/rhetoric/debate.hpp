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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rhetoric/error.hpp"
#include "rhetoric/gateway.hpp"
#include "rhetoric/log.hpp"
#include "rhetoric/prompts.hpp"
#include "rhetoric/stances.hpp"
#include "rhetoric/strategy.hpp"
#include "rhetoric/strategy_guide.hpp"

namespace rhetoric {

enum class Side { Pro, Con };
enum class Termination { MaxRounds, Consensus, RegenerationExhausted };

inline std::string_view to_string(Side s) { return s == Side::Pro ? "pro" : "con"; }

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxRounds: return "max_rounds";
    case Termination::Consensus: return "consensus";
    case Termination::RegenerationExhausted: return "regeneration_exhausted";
  }
  return "?";
}

inline Side parse_side(std::string_view s) {
  if (s == "pro") return Side::Pro;
  if (s == "con") return Side::Con;
  throw Error(ErrorKind::InvalidArgument, "unknown side '" + std::string(s) + "'");
}

inline Termination parse_termination(std::string_view s) {
  for (auto t : {Termination::MaxRounds, Termination::Consensus, Termination::RegenerationExhausted}) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown termination '" + std::string(s) + "'");
}

struct DialogueSpec {
  std::string topic_id;
  StrategyKind strategy = StrategyKind::Causal;
  Condition condition = Condition::Use;
  int max_rounds = 5;
  int max_revisions = 2;
  /// Failed round regenerations tolerated before giving up on the dialogue.
  int max_regenerations = 2;

  void validate() const {
    if (max_rounds < 1) throw Error(ErrorKind::InvalidArgument, "max_rounds must be >= 1");
    if (max_revisions < 0) throw Error(ErrorKind::InvalidArgument, "max_revisions must be >= 0");
    if (max_regenerations < 0) throw Error(ErrorKind::InvalidArgument, "max_regenerations must be >= 0");
  }
};

struct Utterance {
  std::string utterance_id;
  std::string dialogue_id;
  int round = 1;
  Side side = Side::Pro;
  std::string text;
  int revision_count = 0;
  int word_count = 0;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct DebateDialogue {
  std::string dialogue_id;
  DialogueSpec spec;
  std::vector<Utterance> utterances;
  Termination termination = Termination::MaxRounds;

  int rounds() const { return utterances.empty() ? 0 : utterances.back().round; }
};

struct RoundVerdict {
  bool on_topic = true;
  bool repetitive = false;
  bool consensus = false;
};

/// Whitespace-token count.
inline int count_words(std::string_view text) {
  int n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

inline std::string dialogue_id_for(const std::string& topic_id, StrategyKind s, Condition c) {
  return topic_id + "-" + std::string(to_string(s)) + "-" + std::string(to_string(c));
}

inline std::string utterance_id_for(const std::string& dialogue_id, int round, Side side) {
  return dialogue_id + "-r" + std::to_string(round) + "-" + std::string(to_string(side));
}

namespace detail {

inline std::map<std::string, std::string> strategy_bindings(StrategyKind s, const StrategyGuide& guide) {
  return {{"strategy", std::string(to_string(s))}, {"definition", guide.definitions[s]}};
}

inline std::string format_history(const std::vector<Utterance>& history) {
  if (history.empty()) return "(the debate has not started yet)";
  std::string out;
  for (const auto& u : history) {
    out += "Round " + std::to_string(u.round) + " - " + (u.side == Side::Pro ? "Pro" : "Con") + ": " + u.text + "\n";
  }
  out.pop_back();
  return out;
}

/// YES/NO judgement with one re-ask; `fallback` on a second unparseable reply.
inline bool judge(Gateway& gw, const ChatRequest& req, bool fallback, const std::string& what) {
  try {
    return ask_parsed(gw, req, parse_yes_no, prompts::kYesNoHint);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseFailure) throw;
    warn(what + ": unparseable verdict after re-ask, defaulting to " + (fallback ? "YES" : "NO"));
    return fallback;
  }
}

}  // namespace detail

/// True when the utterance honors the use/avoid instruction for `strategy`.
/// Two unparseable replies count as aligned so the revise loop terminates.
inline bool detect_strategy_alignment(const std::string& utterance, StrategyKind strategy, Condition condition,
                                      Gateway& gw, const StrategyGuide& guide = StrategyGuide::builtin()) {
  auto b = detail::strategy_bindings(strategy, guide);
  b["utterance"] = utterance;
  auto req = gw.prompt(condition == Condition::Use ? prompts::kDetectUse : prompts::kDetectAvoid, b, true);
  return detail::judge(gw, req, true, "strategy detection");
}

inline std::string revise_utterance(const std::string& utterance, StrategyKind strategy, Condition condition,
                                    Gateway& gw, const StrategyGuide& guide = StrategyGuide::builtin()) {
  auto b = detail::strategy_bindings(strategy, guide);
  b["utterance"] = utterance;
  auto req = gw.prompt(condition == Condition::Use ? prompts::kReviseUse : prompts::kReviseAvoid, b, false);
  auto reply = detail::trim(gw.complete(req));
  if (reply.empty()) {
    warn("revision returned empty text; keeping the original");
    return utterance;
  }
  return reply;
}

/// Redundancy pass applied once after the detect-and-revise loop.
inline std::string refine_redundancy(const std::string& utterance, Gateway& gw) {
  auto req = gw.prompt(prompts::kRedundancy, {{"utterance", utterance}}, false);
  auto reply = detail::trim(gw.complete(req));
  if (reply.empty()) {
    warn("redundancy refinement returned empty text; keeping the original");
    return utterance;
  }
  return reply;
}

struct AlignedText {
  std::string text;
  int revision_count = 0;
};

/// Detect, and revise while misaligned, at most `max_revisions` times. The
/// final revision is not re-checked.
inline AlignedText align_utterance(std::string text, StrategyKind strategy, Condition condition, int max_revisions,
                                   Gateway& gw, const StrategyGuide& guide = StrategyGuide::builtin()) {
  int revisions = 0;
  while (revisions < max_revisions && !detect_strategy_alignment(text, strategy, condition, gw, guide)) {
    text = revise_utterance(text, strategy, condition, gw, guide);
    ++revisions;
  }
  return {std::move(text), revisions};
}

inline RoundVerdict check_round(const std::string& pro_text, const std::string& con_text,
                                const std::vector<Utterance>& history, const std::string& topic, Gateway& gw) {
  if (pro_text.empty() || con_text.empty()) throw Error(ErrorKind::InvalidArgument, "empty utterance in round check");
  std::string previous = "(none; this is the first round)";
  if (!history.empty()) {
    const int last = history.back().round;
    std::vector<Utterance> prev;
    for (const auto& u : history) {
      if (u.round == last) prev.push_back(u);
    }
    previous = detail::format_history(prev);
  }
  std::map<std::string, std::string> b{{"topic", topic},
                                       {"pro", pro_text},
                                       {"con", con_text},
                                       {"previous", previous},
                                       {"history", detail::format_history(history)}};
  RoundVerdict v;
  v.on_topic = detail::judge(gw, gw.prompt(prompts::kCheckTopic, b, true), true, "topic check");
  v.repetitive = detail::judge(gw, gw.prompt(prompts::kCheckRepetition, b, true), false, "repetition check");
  v.consensus = detail::judge(gw, gw.prompt(prompts::kCheckConsensus, b, true), false, "consensus check");
  return v;
}

/// Runs one strategy-conditioned debate. Each round: Pro then Con, each
/// generated, aligned and de-duplicated; then the round checks. Off-topic or
/// repetitive rounds are regenerated; consensus ends the debate.
inline DebateDialogue generate_dialogue(const DialogueSpec& spec, const StancePair& stances, Gateway& gw,
                                        const StrategyGuide& guide = StrategyGuide::builtin()) {
  spec.validate();
  if (stances.topic_id != spec.topic_id) {
    throw Error(ErrorKind::InvalidArgument, "stances for " + stances.topic_id + " given for " + spec.topic_id);
  }
  DebateDialogue d;
  d.spec = spec;
  d.dialogue_id = dialogue_id_for(spec.topic_id, spec.strategy, spec.condition);
  const std::string topic = stances.topic_text.empty() ? spec.topic_id : stances.topic_text;
  const char* gen_template = spec.condition == Condition::Use ? prompts::kUtteranceUse : prompts::kUtteranceAvoid;

  auto speak = [&](Side side, int round, int attempt, const std::vector<Utterance>& history) {
    auto b = detail::strategy_bindings(spec.strategy, guide);
    b["topic"] = topic;
    b["stance"] = side == Side::Pro ? stances.stance_pro : stances.stance_con;
    b["history"] = detail::format_history(history);
    b["round"] = std::to_string(round);
    b["attempt_note"] =
        attempt == 0 ? std::string()
                     : " This is regeneration attempt " + std::to_string(attempt) +
                           ": the previous version of this round was rejected as off-topic or repetitive, so "
                           "take a different angle.";
    auto raw = detail::trim(gw.complete(gw.prompt(gen_template, b, false)));
    if (raw.empty()) throw Error(ErrorKind::ParseFailure, d.dialogue_id + ": empty utterance");
    auto aligned = align_utterance(std::move(raw), spec.strategy, spec.condition, spec.max_revisions, gw, guide);
    Utterance u;
    u.dialogue_id = d.dialogue_id;
    u.round = round;
    u.side = side;
    u.utterance_id = utterance_id_for(d.dialogue_id, round, side);
    u.text = refine_redundancy(aligned.text, gw);
    u.revision_count = aligned.revision_count;
    u.word_count = count_words(u.text);
    return u;
  };

  d.termination = Termination::MaxRounds;
  for (int round = 1; round <= spec.max_rounds; ++round) {
    bool accepted = false;
    RoundVerdict verdict;
    for (int attempt = 0; attempt <= spec.max_regenerations; ++attempt) {
      auto history = d.utterances;
      auto pro = speak(Side::Pro, round, attempt, history);
      history.push_back(pro);
      auto con = speak(Side::Con, round, attempt, history);
      verdict = check_round(pro.text, con.text, d.utterances, topic, gw);
      if (verdict.on_topic && !verdict.repetitive) {
        d.utterances.push_back(std::move(pro));
        d.utterances.push_back(std::move(con));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      d.termination = Termination::RegenerationExhausted;
      warn(d.dialogue_id + ": round " + std::to_string(round) + " rejected after regenerations");
      break;
    }
    if (verdict.consensus) {
      d.termination = Termination::Consensus;
      break;
    }
  }
  return d;
}

struct CorpusOptions {
  int max_rounds = 5;
  int max_revisions = 2;
  int max_regenerations = 2;
  /// Dialogues generated concurrently; the gateway still bounds requests.
  int workers = 1;
};

struct DialogueFailure {
  std::string dialogue_id;
  std::string error;
};

struct CorpusResult {
  std::vector<DebateDialogue> dialogues;
  std::vector<DialogueFailure> failures;
};

/// Eight dialogues per topic (4 strategies x use/avoid), in a fixed order
/// that does not depend on scheduling.
inline CorpusResult generate_corpus(const std::vector<StancePair>& topics, Gateway& gw, const CorpusOptions& opts = {},
                                    const StrategyGuide& guide = StrategyGuide::builtin()) {
  std::vector<DialogueSpec> specs;
  for (const auto& t : topics) {
    for (auto s : kAllStrategies) {
      for (auto c : kAllConditions) {
        specs.push_back({t.topic_id, s, c, opts.max_rounds, opts.max_revisions, opts.max_regenerations});
      }
    }
  }
  std::vector<std::optional<DebateDialogue>> slots(specs.size());
  std::vector<std::string> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        slots[i] = generate_dialogue(specs[i], topics[i / 8], gw, guide);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(specs.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  CorpusResult result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (slots[i]) {
      result.dialogues.push_back(std::move(*slots[i]));
    } else {
      result.failures.push_back({dialogue_id_for(specs[i].topic_id, specs[i].strategy, specs[i].condition),
                                 errors[i]});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// debates.jsonl

inline std::vector<nlohmann::ordered_json> to_jsonl(const std::vector<DebateDialogue>& dialogues) {
  std::vector<nlohmann::ordered_json> lines;
  for (const auto& d : dialogues) {
    for (const auto& u : d.utterances) {
      nlohmann::ordered_json j;
      j["utterance_id"] = u.utterance_id;
      j["dialogue_id"] = u.dialogue_id;
      j["topic_id"] = d.spec.topic_id;
      j["strategy"] = std::string(to_string(d.spec.strategy));
      j["condition"] = std::string(to_string(d.spec.condition));
      j["round"] = u.round;
      j["side"] = std::string(to_string(u.side));
      j["text"] = u.text;
      j["revision_count"] = u.revision_count;
      j["word_count"] = u.word_count;
      j["termination"] = std::string(to_string(d.termination));
      lines.push_back(std::move(j));
    }
  }
  return lines;
}

/// Flat per-utterance view of debates.jsonl.
struct UtteranceRow {
  Utterance utterance;
  std::string topic_id;
  StrategyKind strategy = StrategyKind::Causal;
  Condition condition = Condition::Use;
  Termination termination = Termination::MaxRounds;
};

inline UtteranceRow utterance_row_from_json(const nlohmann::ordered_json& j) {
  UtteranceRow r;
  r.utterance.utterance_id = j.at("utterance_id").get<std::string>();
  r.utterance.dialogue_id = j.at("dialogue_id").get<std::string>();
  r.utterance.round = j.at("round").get<int>();
  r.utterance.side = parse_side(j.at("side").get<std::string>());
  r.utterance.text = j.at("text").get<std::string>();
  r.utterance.revision_count = j.at("revision_count").get<int>();
  r.utterance.word_count = j.at("word_count").get<int>();
  r.topic_id = j.at("topic_id").get<std::string>();
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.condition = parse_condition(j.at("condition").get<std::string>());
  r.termination = parse_termination(j.at("termination").get<std::string>());
  return r;
}

}  // namespace rhetoric
