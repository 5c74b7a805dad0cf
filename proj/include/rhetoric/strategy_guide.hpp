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
#include <string>
#include <vector>

#include <json.hpp>

#include "rhetoric/csv.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/strategy.hpp"

namespace rhetoric {

/// Operational definition and few-shot exemplars for each strategy. Shared by
/// the generation prompts (definitions) and the annotation prompt (both).
struct StrategyGuide {
  PerStrategy<std::string> definitions;
  PerStrategy<std::vector<std::string>> exemplars;

  static StrategyGuide builtin() {
    StrategyGuide g;
    g.definitions.causal() =
        "A causal argument relies on cause-and-effect reasoning to explain or predict the positive or "
        "negative consequences of an action that are measurable or observable, with or without evidence.";
    g.definitions.empirical() =
        "An empirical argument relies on evidence such as statistics, examples, illustrations, anecdotes, "
        "and/or citations to sources that support the argument.";
    g.definitions.emotional() =
        "An emotional argument relies on impassioned, arousing, or provocative language to express or evoke "
        "feelings (such as frustration, fear, hope, joy, desire, sadness, hurt, and/or surprise).";
    g.definitions.moral() =
        "A moral argument relies on concepts of right and wrong, justice, virtue, duty, or the greater good in "
        "order to persuade others about the ethical merit of a position, decision, or behavior.";
    g.exemplars.causal() = {
        "Allowing prisoners to choose death reduces public pressure to improve the prison system.",
        "Mandatory vaccination could result in rich countries hoarding vaccines for their population. This "
        "could make vaccines inaccessible or unaffordable for poorer countries."};
    g.exemplars.empirical() = {
        "The issue of animal extinction could be largely fixed with lab-grown meat. US consultancy firm "
        "Kearney suggests that 35% of all meat consumed globally will be cell-based by 2040.",
        "Research has estimated that many death row inmates were wrongly convicted and could have been "
        "exonerated."};
    g.exemplars.emotional() = {
        "Gay marriage is a lifestyle choice. It may be considered 'unnatural', but that is between that "
        "person and his/her love interest. Love is all some people have... You can't take that one given "
        "right away because it makes you uncomfortable. They want acceptance and understanding. Let them be "
        "happy or just ignore it. You don't choose to be gay either. Who would choose to live that way? They "
        "are constantly being harassed and can't be with their loved one. It's unfortunate and cruel. Please "
        "be respectful of them. They have done nothing wrong, God created them that way.",
        "These players are earning disgusting weekly salaries and the NHS is on its knees and the staff are "
        "putting their lives at risk whilst the footballers stay at home drinking Molt!"};
    g.exemplars.moral() = {
        "It is a duty of the state to protect its citizens from life-threatening diseases such as COVID-19.",
        "It's unfair that families of prisoners can't see prisoners; it's also unfair how they're more at risk "
        "from COVID-19."};
    return g;
  }

  /// Schema: {"strategies": {"causal": {"definition": str, "exemplars": [str, str]}, ...}}
  static StrategyGuide from_json(const nlohmann::json& j) {
    StrategyGuide g;
    try {
      const auto& s = j.at("strategies");
      for (auto k : kAllStrategies) {
        const auto& entry = s.at(std::string(to_string(k)));
        g.definitions[k] = entry.at("definition").get<std::string>();
        g.exemplars[k] = entry.at("exemplars").get<std::vector<std::string>>();
        if (g.exemplars[k].empty()) {
          throw Error(ErrorKind::SchemaViolation, "no exemplars for " + std::string(to_string(k)));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, std::string("exemplars file: ") + e.what());
    }
    return g;
  }

  static StrategyGuide from_file(const std::string& path) {
    try {
      return from_json(nlohmann::json::parse(csv::read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::SchemaViolation, path + ": " + e.what());
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json s;
    for (auto k : kAllStrategies) {
      s[std::string(to_string(k))] = {{"definition", definitions[k]}, {"exemplars", exemplars[k]}};
    }
    return {{"strategies", s}};
  }

  /// Definitions followed by the numbered exemplars, as embedded in prompts.
  std::string few_shot_block() const {
    std::string out;
    for (auto k : kAllStrategies) {
      std::string name(to_string(k));
      name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
      out += name + ": " + definitions[k] + "\n";
      for (std::size_t i = 0; i < exemplars[k].size(); ++i) {
        out += "  Example " + std::to_string(i + 1) + ": " + exemplars[k][i] + "\n";
      }
      out += "\n";
    }
    return out;
  }
};

}  // namespace rhetoric
