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
"""Regenerates the test fixtures and their goldens.

Goldens are computed here with numpy/scipy/scikit-learn, independently of
the C++ code they check. Run from any directory; output is deterministic.
"""

import csv
import itertools
import json
import pathlib
import random

import numpy as np
from scipy import stats
from sklearn.metrics import cohen_kappa_score

HERE = pathlib.Path(__file__).resolve().parent
STRATEGIES = ["causal", "empirical", "emotional", "moral"]


def write_csv(name, header, rows):
    with open(HERE / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# Keywords and votes: 475 keywords, 146 retained, 121 political, 25 not.

POLITICAL_NOUNS = [
    "minimum wage", "gun control", "immigration quotas", "carbon tax", "voter ID laws",
    "border wall", "universal healthcare", "student debt relief", "death penalty", "term limits",
    "campaign finance", "affirmative action", "police funding", "tariffs", "foreign aid",
    "military spending", "abortion access", "drug legalization", "union membership", "estate tax",
    "school vouchers", "net neutrality", "electoral college", "refugee admissions", "welfare reform",
]
POLITICAL_MODIFIERS = ["federal", "state", "expanded", "reduced", "mandatory"]
OTHER_NOUNS = [
    "homework", "daylight saving time", "zoos", "video games", "school uniforms",
    "tipping", "space tourism", "homeschooling", "cosmetic surgery", "pineapple on pizza",
    "standardized testing", "reality television", "esports", "year-round school", "cash payments",
]
OTHER_MODIFIERS = ["banning", "more", "less", "required", "subsidized"]
FILLER_NOUNS = [
    "weather", "gardening", "bread", "coffee", "music festivals", "hiking trails", "chess",
    "photography", "knitting", "bird watching", "sailing", "origami", "pottery", "baking",
    "fishing", "cycling", "painting", "poetry", "podcasts", "board games", "astronomy",
    "camping", "jazz", "tea", "running", "yoga", "cartoons", "museums", "libraries", "trains",
]
FILLER_MODIFIERS = ["local", "modern", "classic", "outdoor", "indoor", "amateur", "weekend",
                    "urban", "rural", "seasonal", "family", "digital"]


def make_topics(rng):
    political = [f"{m} {n}" for n in POLITICAL_NOUNS for m in POLITICAL_MODIFIERS]
    other = [f"{m} {n}" for n in OTHER_NOUNS for m in OTHER_MODIFIERS]
    filler = [f"{m} {n}" for n in FILLER_NOUNS for m in FILLER_MODIFIERS]
    rng.shuffle(political)
    rng.shuffle(other)
    rng.shuffle(filler)
    retained_pol = political[:121]
    retained_non = other[:25]
    dropped = political[121:] + other[25:] + filler
    dropped = dropped[: 475 - 146]
    assert len(dropped) == 329

    entries = []  # (text, controversy votes, political votes)
    # Political labels: 111 unanimous, 10 resolved to yes by a third vote.
    for i, t in enumerate(retained_pol):
        pv = ["yes", "yes"] if i < 111 else (["yes", "no", "yes"] if i % 2 else ["no", "yes", "yes"])
        entries.append((t, ["yes", "yes"], pv))
    # Non-political: 20 unanimous, 5 resolved to no by a third vote.
    for i, t in enumerate(retained_non):
        pv = ["no", "no"] if i < 20 else ["yes", "no", "no"]
        entries.append((t, ["yes", "yes"], pv))
    # Dropped: first two controversy votes are not both yes. A third "yes"
    # vote on some of them must not rescue them.
    patterns = [["yes", "no"], ["no", "yes"], ["no", "no"], ["yes", "no", "yes"], ["no", "yes", "yes"]]
    for i, t in enumerate(dropped):
        entries.append((t, patterns[i % len(patterns)], []))
    rng.shuffle(entries)
    return entries


def write_topic_fixtures(rng):
    entries = make_topics(rng)
    topics, cvotes, pvotes = [], [], []
    for i, (text, cv, pv) in enumerate(entries, start=1):
        tid = f"t{i:03d}"
        topics.append((tid, text))
        cvotes += [(tid, f"a{k + 1}", v) for k, v in enumerate(cv)]
        pvotes += [(tid, f"a{k + 1}", v) for k, v in enumerate(pv)]
    write_csv("topics.csv", ["topic_id", "text"], topics)
    write_csv("controversy_votes.csv", ["topic_id", "annotator_id", "vote"], cvotes)
    write_csv("political_votes.csv", ["topic_id", "annotator_id", "vote"], pvotes)


def write_mini_topics():
    # Three keywords, two survive the controversy filter.
    write_csv("mini_topics.csv", ["topic_id", "text"],
              [("m1", "carbon tax"), ("m2", "weekend chess"), ("m3", "school uniforms")])
    write_csv("mini_controversy_votes.csv", ["topic_id", "annotator_id", "vote"],
              [("m1", "a1", "yes"), ("m1", "a2", "yes"), ("m2", "a1", "no"), ("m2", "a2", "yes"),
               ("m3", "a1", "yes"), ("m3", "a2", "yes")])
    write_csv("mini_political_votes.csv", ["topic_id", "annotator_id", "vote"],
              [("m1", "a1", "yes"), ("m1", "a2", "yes"), ("m3", "a1", "yes"), ("m3", "a2", "no"),
               ("m3", "a3", "no")])


# ---------------------------------------------------------------------------
# Human annotation matrix with agreement goldens.

def collapse(x, classes):
    if classes == 5:
        return x
    if classes == 3:
        return 0 if x <= 2 else (1 if x == 3 else 2)
    return 1 if x >= 4 else 0


def agreement(cells, raters, classes, min_overlap=10):
    out = {}
    for s in STRATEGIES:
        kappas = []
        for r1, r2 in itertools.combinations(raters, 2):
            a, b = [], []
            for (item, rater, strat), v in cells.items():
                if rater != r1 or strat != s:
                    continue
                w = cells.get((item, r2, s))
                if w is not None:
                    a.append(collapse(v, classes))
                    b.append(collapse(w, classes))
            if len(a) >= min_overlap:
                kappas.append(cohen_kappa_score(a, b))
        out[s] = {"average_kappa": float(np.mean(kappas)), "qualifying_pairs": len(kappas)}
    return out


def write_human_scores():
    raters = [f"r{k}" for k in range(1, 6)]
    items = [f"arg{i:03d}" for i in range(1, 49)]
    for seed in range(1000):
        rng = random.Random(seed)
        cells = {}
        for item in items:
            panel = sorted(rng.sample(raters, rng.choice([3, 4, 5])))
            for s in STRATEGIES:
                latent = rng.choice([1, 2, 2, 3, 4, 4, 5])
                for r in panel:
                    v = latent + rng.choice([-1, 0, 0, 0, 1])
                    cells[(item, r, s)] = min(5, max(1, v))
        golden = {c: agreement(cells, raters, c) for c in (5, 3, 2)}
        if all(golden[5][s]["average_kappa"] < golden[3][s]["average_kappa"] < golden[2][s]["average_kappa"]
               for s in STRATEGIES):
            break
    else:
        raise SystemExit("no seed gives the kappa ordering")
    rows = [(item, r, s, v) for (item, r, s), v in cells.items()]
    rows.sort(key=lambda x: (x[0], x[1], STRATEGIES.index(x[2])))
    write_csv("human_scores.csv", ["item_id", "rater_id", "strategy", "likert"], rows)
    names = {5: "five_class", 3: "three_class", 2: "two_class"}
    with open(HERE / "agreement_golden.json", "w") as f:
        json.dump({"min_overlap": 10, "schemes": {names[c]: golden[c] for c in (5, 3, 2)}}, f, indent=2)
        f.write("\n")


# ---------------------------------------------------------------------------
# Transcript segmentation: each turn carries the hand-assigned expectation.

TURNS = [
    # year, debate, speaker, party, text, kept
    (1960, "1960-1", "Howard K. Smith", "Moderator",
     "Good evening. The candidates need no introduction, and tonight we begin with domestic issues.", False),
    (1960, "1960-1", "John F. Kennedy", "Democrat",
     "I think the question before us is whether the world will exist half slave or half free.", True),
    (1960, "1960-1", "Richard Nixon", "Republican",
     "I agree with Senator Kennedy on that.", True),
    (1960, "1960-1", "Richard Nixon", "Republican", "Thank you very much.", False),
    (1960, "1960-1", "John F. Kennedy", "Democrat",
     "We must move, and the numbers on steel production, on schools, on housing tell us we are standing still.",
     True),
    (1976, "1976-2", "Pauline Frederick", "Moderator", "Governor, your response?", False),
    (1976, "1976-2", "Jimmy Carter", "Democrat",
     "Our people, the families I have met in every state, deserve a government as good and honest as they are.",
     True),
    (1976, "1976-2", "Gerald Ford", "Republican", "That is simply not accurate.", True),
    (1976, "1976-2", "Gerald Ford", "Republican", "Not true, Governor.", False),
    (1976, "1976-2", "Eugene McCarthy", "Other",
     "Neither of these gentlemen will tell you what the real choices facing this country are tonight.", False),
    (1992, "1992-3", "Jim Lehrer", "Moderator",
     "Mr. Perot, ninety seconds, and then we will turn to the question of taxes and the deficit.", False),
    (1992, "1992-3", "Ross Perot", "Other",
     "It's just that simple: if you keep borrowing, the giant sucking sound gets louder every year.", False),
    (1992, "1992-3", "Bill Clinton", "Democrat",
     "When plants close, people lose their jobs, then their health care, then their homes, and that is why \"trickle down\" failed.",
     True),
    (1992, "1992-3", "George Bush", "Republican",
     "Character matters, and the American people know the difference between right and wrong in the White House.",
     True),
    (1992, "1992-3", "Bill Clinton", "Democrat", "I disagree, Mr. President.", False),
    (2016, "2016-1", "Lester Holt", "Moderator", "Thank you.", False),
    (2016, "2016-1", "Hillary Clinton", "Democrat",
     "Independent experts have looked at my plan and concluded it would create ten million jobs, not lose them.",
     True),
    (2016, "2016-1", "Donald Trump", "Republican",
     "Wrong.   Wrong.   Wrong.   Wrong.", False),
    (2016, "2016-1", "Donald Trump", "Republican",
     "Our jobs are fleeing the country, going to Mexico, going to many other countries, and we have to stop it.",
     True),
    (2016, "2016-1", "Hillary Clinton", "Democrat",
     "Well, Donald, I know you live in your own reality, but, frankly, that is not the facts.", True),
]


def write_transcript():
    assert len(TURNS) == 20
    write_csv("transcript.csv", ["year", "debate_id", "speaker", "party", "text"],
              [t[:5] for t in TURNS])
    golden = []
    for year, debate, speaker, party, text, kept in TURNS:
        words = len(text.split())
        computed = party in ("Democrat", "Republican") and words >= 5
        assert computed == kept, (speaker, text)
        if kept:
            golden.append({"year": year, "debate_id": debate, "speaker": speaker, "party": party,
                           "text": text, "word_count": words})
    with open(HERE / "transcript_golden.json", "w") as f:
        json.dump(golden, f, indent=2)
        f.write("\n")


# ---------------------------------------------------------------------------
# Scored arguments and plot-data goldens.

def fixed6(v):
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def mean_ci(xs):
    xs = np.asarray(xs, dtype=float)
    m = fixed6(float(np.mean(xs)))
    if len(xs) < 2:
        return m + ","
    h = stats.t.ppf(0.975, len(xs) - 1) * np.std(xs, ddof=1) / np.sqrt(len(xs))
    return m + "," + fixed6(float(h))


def write_scored_arguments():
    rng = random.Random(4242)
    plan = [(1960, 4), (1976, 5), (1992, 6), (2016, 7), (2020, 1)]
    args = []
    for year, n in plan:
        for k in range(n):
            party = "Democrat" if k % 2 == 0 else "Republican"
            drift = (year - 1960) / 400.0
            sc = [round(min(1.0, max(0.0, rng.uniform(0.1, 0.8) + d)), 3)
                  for d in (-drift, -drift / 2, drift, drift / 2)]
            text = f"Argument {k + 1} from {year}, spoken by the {party} candidate on the issues."
            args.append({"year": year, "debate_id": f"{year}-1", "speaker": f"{party} nominee",
                         "party": party, "text": text, "word_count": len(text.split()),
                         "scores": dict(zip(STRATEGIES, sc))})
    with open(HERE / "scored_arguments.jsonl", "w") as f:
        for a in args:
            f.write(json.dumps(a, separators=(",", ":")) + "\n")

    header = "year,n," + ",".join(f"{s}_mean,{s}_ci95" for s in STRATEGIES)
    trend = [header + ",affect_gap_affective_minus_cognitive_mean"]
    for year in sorted({a["year"] for a in args}):
        sel = [a for a in args if a["year"] == year]
        cells = [mean_ci([a["scores"][s] for a in sel]) for s in STRATEGIES]
        gaps = [(a["scores"]["emotional"] + a["scores"]["moral"]) / 2
                - (a["scores"]["causal"] + a["scores"]["empirical"]) / 2 for a in sel]
        trend.append(f"{year},{len(sel)}," + ",".join(cells) + "," + fixed6(float(np.mean(gaps))))
    (HERE / "trend_golden.csv").write_text("\n".join(trend) + "\n")

    partisan = ["strategy,party,n,mean,ci95"]
    for s in STRATEGIES:
        for party in ("Democrat", "Republican"):
            xs = [a["scores"][s] for a in args if a["party"] == party]
            partisan.append(f"{s},{party},{len(xs)}," + mean_ci(xs))
    (HERE / "partisan_golden.csv").write_text("\n".join(partisan) + "\n")


def main():
    write_topic_fixtures(random.Random(20260101))
    write_mini_topics()
    write_human_scores()
    write_transcript()
    write_scored_arguments()


if __name__ == "__main__":
    main()
