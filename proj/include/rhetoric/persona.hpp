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
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rhetoric/error.hpp"
#include "rhetoric/random.hpp"

namespace rhetoric {

enum class Gender { Male, Female };
enum class Race { Black, White, Asian, AIAN, NHPI };
enum class Education {
  LessThanHighSchool,
  HighSchoolGraduate,
  SomeCollege,
  Associate,
  Bachelor,
  Master,
  Professional,
  Doctoral
};
enum class Leaning { Democrat, Republican, Independent };

inline constexpr int kGenderCount = 2;
inline constexpr int kRaceCount = 5;
inline constexpr int kEducationCount = 8;
inline constexpr int kLeaningCount = 3;
/// Five-year brackets 15-19 through 85-89.
inline constexpr int kAgeGroupCount = 15;
inline constexpr int kMinAge = 15;
inline constexpr int kMaxAge = 89;

/// Index into the five-year brackets; 0 is 15-19, 14 is 85-89.
struct AgeGroup {
  int index = 0;

  int lower() const { return kMinAge + 5 * index; }
  int upper() const { return lower() + 4; }
  std::string label() const { return std::to_string(lower()) + "-" + std::to_string(upper()); }
  friend bool operator==(const AgeGroup&, const AgeGroup&) = default;
};

inline constexpr std::array<std::string_view, kGenderCount> kGenderNames = {"Male", "Female"};
inline constexpr std::array<std::string_view, kRaceCount> kRaceNames = {"Black", "White", "Asian", "AIAN", "NHPI"};
inline constexpr std::array<std::string_view, kEducationCount> kEducationNames = {
    "less_than_high_school", "high_school_graduate", "some_college", "associate_degree",
    "bachelors_degree",      "masters_degree",       "professional_degree", "doctoral_degree"};
inline constexpr std::array<std::string_view, kLeaningCount> kLeaningNames = {"Democrat", "Republican",
                                                                              "Independent"};

struct Persona {
  Gender gender = Gender::Male;
  AgeGroup age_group;
  Race race = Race::White;
  Education education = Education::HighSchoolGraduate;
  Leaning leaning = Leaning::Independent;

  friend bool operator==(const Persona&, const Persona&) = default;

  /// Second-person description used as the annotator's system preamble.
  std::string describe() const {
    static constexpr std::array<std::string_view, kRaceCount> race_text = {
        "Black", "White", "Asian", "American Indian or Alaska Native", "Native Hawaiian or Pacific Islander"};
    static constexpr std::array<std::string_view, kEducationCount> edu_text = {
        "less than a high school diploma", "a high school diploma", "some college but no degree",
        "an associate degree", "a bachelor's degree", "a master's degree", "a professional degree",
        "a doctoral degree"};
    const auto race_name = race_text[static_cast<std::size_t>(race)];
    std::string s = std::string("AEIOU").find(race_name.front()) == std::string::npos ? "You are a " : "You are an ";
    s += race_name;
    s += gender == Gender::Male ? " man" : " woman";
    s += " aged " + age_group.label() + " living in the United States. Your highest level of education is ";
    s += edu_text[static_cast<std::size_t>(education)];
    s += ". Politically, you identify as ";
    s += leaning == Leaning::Independent ? "an Independent" : std::string("a ") + std::string(kLeaningNames[static_cast<std::size_t>(leaning)]);
    s += ". Answer as this person would.";
    return s;
  }

  nlohmann::ordered_json to_json() const {
    return {{"gender", kGenderNames[static_cast<std::size_t>(gender)]},
            {"age_group", age_group.label()},
            {"race", kRaceNames[static_cast<std::size_t>(race)]},
            {"education", kEducationNames[static_cast<std::size_t>(education)]},
            {"leaning", kLeaningNames[static_cast<std::size_t>(leaning)]}};
  }
};

/// Marginals for gender, age and race; education conditioned on
/// (age, gender); leaning conditioned on education.
struct DemographicTables {
  std::array<double, kGenderCount> gender{};
  std::array<double, kAgeGroupCount> age{};
  std::array<double, kRaceCount> race{};
  /// [age][gender][education]
  std::array<std::array<std::array<double, kEducationCount>, kGenderCount>, kAgeGroupCount> education{};
  /// [education][leaning]
  std::array<std::array<double, kLeaningCount>, kEducationCount> leaning{};

  static constexpr double kTolerance = 1e-9;

  void validate() const {
    auto check = [](std::span<const double> row, const std::string& what) {
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidTables, what + ": negative or non-finite entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kTolerance) {
        throw Error(ErrorKind::InvalidTables, what + ": sums to " + std::to_string(sum));
      }
    };
    check(gender, "gender");
    check(age, "age_group");
    check(race, "race");
    for (int a = 0; a < kAgeGroupCount; ++a) {
      for (int g = 0; g < kGenderCount; ++g) {
        check(education[a][g], "education | " + AgeGroup{a}.label() + "," + std::string(kGenderNames[g]));
      }
    }
    for (int e = 0; e < kEducationCount; ++e) check(leaning[e], "leaning | " + std::string(kEducationNames[e]));
  }

  /// Schema documented in docs/data_formats.md. Unknown category names, for
  /// instance an age bracket outside 15-89, are rejected.
  static DemographicTables from_json(const nlohmann::json& j) {
    DemographicTables t;
    auto fill = [](const nlohmann::json& obj, auto names, std::span<double> dst, const std::string& what) {
      if (!obj.is_object()) throw Error(ErrorKind::InvalidTables, what + " must be an object");
      for (auto& [key, value] : obj.items()) {
        std::size_t i = 0;
        while (i < names.size() && names[i] != key) ++i;
        if (i == names.size()) throw Error(ErrorKind::InvalidTables, what + ": unknown category '" + key + "'");
        dst[i] = value.template get<double>();
      }
    };
    std::array<std::string, kAgeGroupCount> age_labels;
    for (int a = 0; a < kAgeGroupCount; ++a) age_labels[a] = AgeGroup{a}.label();
    try {
      fill(j.at("gender"), kGenderNames, t.gender, "gender");
      fill(j.at("age_group"), age_labels, t.age, "age_group");
      fill(j.at("race"), kRaceNames, t.race, "race");
      for (int a = 0; a < kAgeGroupCount; ++a) {
        for (int g = 0; g < kGenderCount; ++g) {
          const std::string key = age_labels[a] + "|" + std::string(kGenderNames[g]);
          fill(j.at("education_given_age_gender").at(key), kEducationNames, t.education[a][g], key);
        }
      }
      for (int e = 0; e < kEducationCount; ++e) {
        fill(j.at("leaning_given_education").at(std::string(kEducationNames[e])), kLeaningNames, t.leaning[e],
             std::string(kEducationNames[e]));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidTables, e.what());
    }
    t.validate();
    return t;
  }
};

/// Draws `n` personas. Deterministic for a given seed on every platform.
inline std::vector<Persona> sample_personas(std::size_t n, const DemographicTables& tables, std::uint64_t seed) {
  tables.validate();
  Rng rng(seed);
  std::vector<Persona> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Persona p;
    p.gender = static_cast<Gender>(rng.categorical(tables.gender));
    p.age_group = AgeGroup{static_cast<int>(rng.categorical(tables.age))};
    p.race = static_cast<Race>(rng.categorical(tables.race));
    p.education = static_cast<Education>(
        rng.categorical(tables.education[static_cast<std::size_t>(p.age_group.index)][static_cast<std::size_t>(p.gender)]));
    p.leaning = static_cast<Leaning>(rng.categorical(tables.leaning[static_cast<std::size_t>(p.education)]));
    out.push_back(p);
  }
  return out;
}

}  // namespace rhetoric
