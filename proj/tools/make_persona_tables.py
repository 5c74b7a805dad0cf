#!/usr/bin/env python3
# Copyright 2026 The Rhetoric Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes data/persona_tables.json.

Rounded approximations of US adult population shares (census-style
marginals). Education is conditioned on age and gender, leaning on
education. Edit the numbers here and rerun; the C++ loader rejects tables
whose rows do not sum to 1.
"""

import json
import pathlib

EDUCATION = [
    "less_than_high_school", "high_school_graduate", "some_college",
    "associate_degree", "bachelors_degree", "masters_degree",
    "professional_degree", "doctoral_degree",
]

GENDER = {"Male": 0.49, "Female": 0.51}

# 15-19 .. 85-89
AGE_WEIGHTS = [6.4, 6.5, 6.9, 7.1, 6.8, 6.6, 6.1, 6.0, 6.2, 6.4, 6.2, 5.4, 4.4, 3.0, 2.0]

RACE = {"Black": 0.136, "White": 0.755, "Asian": 0.063, "AIAN": 0.013, "NHPI": 0.003}

# Adults 25+, by gender.
ADULT_EDUCATION = {
    "Male":   [0.105, 0.290, 0.150, 0.090, 0.225, 0.095, 0.020, 0.025],
    "Female": [0.095, 0.265, 0.150, 0.110, 0.235, 0.115, 0.015, 0.015],
}

LEANING = {
    "less_than_high_school": [0.34, 0.30, 0.36],
    "high_school_graduate":  [0.28, 0.40, 0.32],
    "some_college":          [0.31, 0.36, 0.33],
    "associate_degree":      [0.31, 0.37, 0.32],
    "bachelors_degree":      [0.40, 0.29, 0.31],
    "masters_degree":        [0.48, 0.24, 0.28],
    "professional_degree":   [0.46, 0.27, 0.27],
    "doctoral_degree":       [0.52, 0.20, 0.28],
}


def normalize(xs):
    s = sum(xs)
    out = [round(x / s, 6) for x in xs]
    out[-1] = round(1.0 - sum(out[:-1]), 6)
    return out


def education_for(age_index, gender):
    base = ADULT_EDUCATION[gender]
    if age_index == 0:  # 15-19: mostly still in school
        return normalize([0.70, 0.22, 0.08, 0, 0, 0, 0, 0])
    if age_index == 1:  # 20-24: few graduate degrees yet
        return normalize([0.08, 0.28, 0.38, 0.09, 0.16, 0.01, 0, 0])
    if age_index >= 11:  # 70+: older cohorts
        w = [base[0] * 1.6, base[1] * 1.2] + base[2:]
        return normalize(w)
    return normalize(base)


def main():
    ages = [f"{15 + 5 * i}-{19 + 5 * i}" for i in range(15)]
    tables = {
        "gender": dict(zip(GENDER, normalize(list(GENDER.values())))),
        "age_group": dict(zip(ages, normalize(AGE_WEIGHTS))),
        "race": dict(zip(RACE, normalize(list(RACE.values())))),
        "education_given_age_gender": {
            f"{age}|{g}": dict(zip(EDUCATION, education_for(i, g)))
            for i, age in enumerate(ages) for g in GENDER
        },
        "leaning_given_education": {
            e: dict(zip(["Democrat", "Republican", "Independent"], normalize(w)))
            for e, w in LEANING.items()
        },
    }
    path = pathlib.Path(__file__).resolve().parent.parent / "data" / "persona_tables.json"
    path.write_text(json.dumps(tables, indent=2) + "\n")


if __name__ == "__main__":
    main()
