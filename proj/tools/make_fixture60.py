#!/usr/bin/env python3
# Copyright 2026 The mamrc Authors.
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

"""Writes the 60-instance synthetic corpus, its labels, and the expected
distribution counts (computed here, independently of the C++ code).

Usage: make_fixture60.py OUT_DIR
"""

import json
import os
import sys

# (dataset, [(kind, count)]) with kind in P, QW, QN, B, U.
LAYOUT = [
    ("DROP", [("P", 6), ("QW", 5), ("QN", 4), ("B", 3), ("U", 2)]),
    ("Quoref", [("P", 5), ("QW", 4), ("QN", 3), ("B", 2), ("U", 1)]),
    ("MultiSpanQA", [("P", 7), ("QW", 9), ("QN", 5), ("B", 2), ("U", 2)]),
]

# Clue phrases cycled over with-clue questions; the last two carry two types.
CLUES = [
    ([("two", "cardinal")], "Which two {w} are named?"),
    ([("first", "ordinal")], "Who were the first {w} listed?"),
    ([("largest", "comp_super")], "Which are the largest {w}?"),
    ([("or", "alternative")], "Was the {w} red or blue?"),
    ([("both", "other_semantics")], "What are both {w}?"),
    ([("three", "cardinal"), ("oldest", "comp_super")], "Which three {w} are the oldest?"),
    ([("second", "ordinal"), ("or", "alternative")], "Was the second {w} won or lost?"),
]

TYPES = ["cardinal", "ordinal", "comp_super", "alternative", "other_semantics"]
KIND_NAME = {"P": "passage_dependent", "QW": "question_dependent", "QN": "question_dependent",
             "B": "bad_annotation"}
FILLER = ["stone", "river", "lamp", "field", "cloud", "bridge", "forest"]


def bucket(n):
    return str(n) if n <= 3 else ">3"


def main():
    out_dir = sys.argv[1]
    corpus, labels = [], []
    types_rows, clue_rows, count_rows = {}, {}, {}
    n_answers_total = multi = multi_answers = 0
    gaps = []
    q_len = c_len = a_len = spans = 0
    serial = clue_i = 0
    for dataset, kinds in LAYOUT:
        types_rows[dataset] = {k: 0 for k in ["P", "Q", "QW", "QN", "B", "U"]}
        clue_rows[dataset] = {t: 0 for t in ["with"] + TYPES}
        for b in ["1", "2", "3", ">3"]:
            count_rows[(dataset, b)] = {k: 0 for k in ["base", "P", "QW", "QN", "B", "U"]}
        for kind, count in kinds:
            for _ in range(count):
                iid = "f%02d" % serial
                n = 1 + serial % 5  # 1..5 answers
                gap = serial % 4  # filler tokens between answers
                answers = ["a%02dx%d" % (serial, k) for k in range(n)]
                if serial % 3 == 0:  # some two-token answers
                    answers[0] = answers[0] + " y" + str(serial)
                tokens = ["The", "passage", str(serial), "says"]
                positions = []
                for k, a in enumerate(answers):
                    if k:
                        tokens += [FILLER[(serial + j) % len(FILLER)] for j in range(gap)]
                    start = len(tokens)
                    tokens += a.split()
                    positions.append((start, len(tokens)))
                tokens.append(".")
                word = "items%d" % serial
                label = None
                if kind == "QW":
                    clue, template = CLUES[clue_i % len(CLUES)]
                    clue_i += 1
                    question = template.format(w=word)
                    label = {"id": iid, "label": "question_dependent",
                             "clue": {"spans": [c for c, _ in clue], "types": [t for _, t in clue]}}
                    clue_rows[dataset]["with"] += 1
                    for t in sorted(set(t for _, t in clue)):
                        clue_rows[dataset][t] += 1
                else:
                    question = "Which %s appear in passage %d?" % (word, serial)
                    if kind != "U":
                        label = {"id": iid, "label": KIND_NAME[kind]}
                corpus.append({"id": iid, "dataset": dataset, "question": question,
                               "passage": " ".join(tokens),
                               "answers": [{"text": a} for a in answers]})
                if label:
                    labels.append(label)
                row = types_rows[dataset]
                row[kind] += 1
                if kind in ("QW", "QN"):
                    row["Q"] += 1
                crow = count_rows[(dataset, bucket(n))]
                crow["base"] += 1
                crow[kind] += 1
                n_answers_total += n
                q_len += len(question.split())
                c_len += len(tokens)
                for a in answers:
                    a_len += len(a.split())
                    spans += 1
                if n >= 2:
                    multi += 1
                    multi_answers += n
                    for k in range(1, n):
                        gaps.append(positions[k][0] - positions[k - 1][1])
                serial += 1

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "fixture60.jsonl"), "w") as f:
        for r in corpus:
            f.write(json.dumps(r) + "\n")
    with open(os.path.join(out_dir, "fixture60_labels.jsonl"), "w") as f:
        for r in labels:
            f.write(json.dumps(r) + "\n")
    expected = {
        "types": {d: {"passage_dependent": r["P"], "question_dependent": r["Q"],
                      "with_clue_word": r["QW"], "no_clue_word": r["QN"],
                      "bad_annotation": r["B"], "unlabeled": r["U"]}
                  for d, r in types_rows.items()},
        "clues": {d: r for d, r in clue_rows.items()},
        "counts": {"%s|%s" % k: r for k, r in count_rows.items()},
        "stats": {"instances": serial, "multi_answer_instances": multi,
                  "mean_answers": n_answers_total / serial,
                  "mean_answers_multi": multi_answers / multi,
                  "mean_question_len": q_len / serial, "mean_context_len": c_len / serial,
                  "mean_answer_len": a_len / spans,
                  "mean_answer_distance": sum(gaps) / len(gaps), "distance_pairs": len(gaps)},
    }
    with open(os.path.join(out_dir, "fixture60_expected.json"), "w") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
