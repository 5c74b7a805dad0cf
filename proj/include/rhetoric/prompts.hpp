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

#include "rhetoric/gateway.hpp"

namespace rhetoric::prompts {

// Template ids. Each id has a `.user` body and optionally a `.system` body.
inline constexpr const char* kStanceGeneration = "stance_generation";
inline constexpr const char* kUtteranceUse = "utterance_use";
inline constexpr const char* kUtteranceAvoid = "utterance_avoid";
inline constexpr const char* kDetectUse = "detect_use";
inline constexpr const char* kDetectAvoid = "detect_avoid";
inline constexpr const char* kReviseUse = "revise_use";
inline constexpr const char* kReviseAvoid = "revise_avoid";
inline constexpr const char* kRedundancy = "refine_redundancy";
inline constexpr const char* kCheckTopic = "check_topic";
inline constexpr const char* kCheckRepetition = "check_repetition";
inline constexpr const char* kCheckConsensus = "check_consensus";
inline constexpr const char* kAnnotate = "annotate";

inline constexpr const char* kYesNoHint = "Answer with a single word: YES or NO.";
inline constexpr const char* kStanceHint =
    "Reply with exactly two lines: 'STANCE_1: <supporting stance>' and 'STANCE_2: <opposing stance>'.";
inline constexpr const char* kLikertHint =
    "Reply with one line of the form 'causal=<1-5> empirical=<1-5> emotional=<1-5> moral=<1-5>'.";

inline TemplateRegistry default_templates() {
  TemplateRegistry r;
  auto add = [&](const std::string& id, const char* body) { r.add({id, body}); };

  add("stance_generation.system",
      "You help prepare balanced debates on controversial issues in the United States.");
  add("stance_generation.user",
      "Topic keyword: {topic}\n\n"
      "Expand this topic into two broad, opposing stances that a debate could be held on. The first stance "
      "supports an action or position on the topic and the second opposes it. Each stance is one short "
      "sentence, for example 'We should legalize marijuana.' and 'We should not legalize marijuana.'\n\n"
      "Reply with exactly two lines:\nSTANCE_1: <supporting stance>\nSTANCE_2: <opposing stance>");

  add("utterance_use.system",
      "You are a debater in a multi-round debate on the topic '{topic}'. Your stance is: {stance}\n"
      "Your opponent holds the opposite stance. Respond to the opponent's latest argument, stay on topic, "
      "do not repeat earlier points, and keep each argument to a short paragraph.\n"
      "In every argument you must use the {strategy} strategy. {definition}");
  add("utterance_use.user",
      "Debate so far:\n{history}\n\n"
      "Write your argument for round {round}.{attempt_note} Reply with the argument text only.");

  add("utterance_avoid.system",
      "You are a debater in a multi-round debate on the topic '{topic}'. Your stance is: {stance}\n"
      "Your opponent holds the opposite stance. Respond to the opponent's latest argument, stay on topic, "
      "do not repeat earlier points, and keep each argument to a short paragraph.\n"
      "In every argument you must avoid the {strategy} strategy entirely. {definition}");
  add("utterance_avoid.user",
      "Debate so far:\n{history}\n\n"
      "Write your argument for round {round}.{attempt_note} Reply with the argument text only.");

  add("detect_use.system", "You judge whether debate arguments use a given rhetorical strategy.");
  add("detect_use.user",
      "Strategy: {strategy}. {definition}\n\nArgument:\n{utterance}\n\n"
      "Does this argument clearly use the {strategy} strategy? Answer YES or NO.");
  add("detect_avoid.system", "You judge whether debate arguments avoid a given rhetorical strategy.");
  add("detect_avoid.user",
      "Strategy: {strategy}. {definition}\n\nArgument:\n{utterance}\n\n"
      "Does this argument completely avoid the {strategy} strategy? Answer YES or NO.");

  add("revise_use.system", "You revise debate arguments to follow a rhetorical strategy.");
  add("revise_use.user",
      "Strategy: {strategy}. {definition}\n\nArgument:\n{utterance}\n\n"
      "The argument does not use the {strategy} strategy clearly enough. Revise it so that it does, keeping "
      "the same stance and length. Reply with the revised argument only.");
  add("revise_avoid.system", "You revise debate arguments to remove a rhetorical strategy.");
  add("revise_avoid.user",
      "Strategy: {strategy}. {definition}\n\nArgument:\n{utterance}\n\n"
      "The argument still uses the {strategy} strategy. Revise it so that it avoids the strategy entirely, "
      "keeping the same stance and length. Reply with the revised argument only.");

  add("refine_redundancy.system", "You edit debate arguments for concision.");
  add("refine_redundancy.user",
      "Argument:\n{utterance}\n\n"
      "Rewrite the argument to remove redundant sentences and trivial or filler language. Keep its stance, "
      "its points and its rhetorical style unchanged. Reply with the rewritten argument only.");

  add("check_topic.system", "You monitor the quality of a generated debate.");
  add("check_topic.user",
      "Debate topic: {topic}\n\nArgument A:\n{pro}\n\nArgument B:\n{con}\n\n"
      "Do both arguments stay on the debate topic? Answer YES or NO.");
  add("check_repetition.system", "You monitor the quality of a generated debate.");
  add("check_repetition.user",
      "Previous round:\n{previous}\n\nCurrent round:\nArgument A:\n{pro}\n\nArgument B:\n{con}\n\n"
      "Does the current round strongly repeat the previous round? Answer YES or NO.");
  add("check_consensus.system", "You monitor the quality of a generated debate.");
  add("check_consensus.user",
      "Debate so far:\n{history}\n\nLatest round:\nArgument A:\n{pro}\n\nArgument B:\n{con}\n\n"
      "Have the two debaters reached a consensus? Answer YES or NO.");

  add("annotate.system",
      "{persona}\n\n"
      "You will rate arguments for four rhetorical strategies. The definitions, each followed by two "
      "examples, are:\n\n{few_shot}"
      "For each strategy, rate the extent to which the argument uses it on a five-point scale: "
      "1 = definitely not using, 2 = probably not, 3 = uncertain, 4 = probably using, 5 = definitely using.\n"
      "Reply with one line of the form: causal=<1-5> empirical=<1-5> emotional=<1-5> moral=<1-5>");
  add("annotate.user", "Argument:\n{argument}");
  return r;
}

}  // namespace rhetoric::prompts
