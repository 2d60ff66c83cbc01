#!/usr/bin/env python3
"""Regenerate the bundled fixtures under fixtures/.

Two sets:
  - sample/: a small token/tag corpus exercising the filter, cleaner,
    and dedup rules, with the expected preprocess survivors.
  - table4/: a 110-source, 6-system tournament whose judgment log scores
    to exactly {392.5, 325.5, 303.0, 285.5, 242.0, 101.5}.

Deterministic: running this script twice produces identical bytes.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from cskit.io_utils import (  # noqa: E402
    assignment_to_records,
    comparison_to_record,
    judgment_to_record,
    write_jsonl,
)
from cskit.tournament import Judgment, Verdict, assign, schedule  # noqa: E402

FIXTURES = ROOT / "fixtures"

SAMPLE_TRAIN = """\
estaba\tspa
aquí\tspa
three\teng
feet\teng
away\teng
.\teng&spa

I\teng
need\teng
a\teng
shot\teng
of\teng
tequila\tspa
or\teng
a\teng
glass\teng
of\teng
scotch\teng
to\teng
keep\teng
me\teng
warm\teng
right\teng
now\teng
.\teng

@maria\tother
dame\tspa
ese\tspa
link\teng
please\teng
http://t.co/xyz\tother

vamos\tspa
vamos\tspa
lets\teng
go\teng
!\teng&spa

this\teng
is\teng
all\teng
english\teng
.\teng
"""

SAMPLE_DEV = """\
VAMOS\tspa
vamos\tspa
Lets\teng
GO\teng
!\teng&spa

no\tspa
pasa\tspa
nada\tspa
it\teng
is\teng
fine\teng
.\teng
"""

SAMPLE_TEST = """\
me\tspa
siento\tspa
tan\tspa
pendejo\tspa
right\teng
now\teng
.\teng&spa

jajaja\tother
lol\tother
"""

# Survivors of ingest (with dedup) + preprocess, in train/dev/test order.
# train-000004 duplicates dev-000001 after normalization, so the dev copy
# wins; train-000002 and train-000005 fail the two-words-per-language
# filter, as does test-000002.
SAMPLE_EXPECTED = [
    {"id": "train-000001", "split": "train", "text": "estaba aquí three feet away."},
    {"id": "train-000003", "split": "train", "text": "<user> dame ese link please"},
    {"id": "dev-000001", "split": "dev", "text": "VAMOS vamos Lets GO!"},
    {"id": "dev-000002", "split": "dev", "text": "no pasa nada it is fine."},
    {"id": "test-000001", "split": "test", "text": "me siento tan pendejo right now."},
]

# 6-system round robin over 110 sources. wins[i][j] = sources where
# system i beats system j; the (gold, sys-a) and (sys-c, sys-e) pairs
# each hold one tie. Row sums + half points give the target scores
# 392.5, 325.5, 303.0, 285.5, 242.0, 101.5 (total 1650).
TABLE4_SYSTEMS = ["gold", "sys-a", "sys-b", "sys-c", "sys-d", "sys-e"]
TABLE4_WINS = [
    [0, 60, 72, 80, 85, 95],
    [49, 0, 58, 65, 70, 83],
    [38, 52, 0, 60, 68, 85],
    [30, 45, 50, 0, 72, 88],
    [25, 40, 42, 38, 0, 97],
    [15, 27, 25, 21, 13, 0],
]
TABLE4_SOURCES = [f"src-{k:03d}" for k in range(1, 111)]
TABLE4_ANNOTATORS = [f"ann-{k:02d}" for k in range(1, 12)]
TABLE4_SEED = 7


def build_sample() -> None:
    sample = FIXTURES / "sample"
    sample.mkdir(parents=True, exist_ok=True)
    (sample / "train.conll").write_text(SAMPLE_TRAIN, encoding="utf-8")
    (sample / "dev.conll").write_text(SAMPLE_DEV, encoding="utf-8")
    (sample / "test.conll").write_text(SAMPLE_TEST, encoding="utf-8")
    write_jsonl(sample / "expected_sentences.jsonl", SAMPLE_EXPECTED)


def table4_judgments() -> list[Judgment]:
    comparisons = schedule(TABLE4_SOURCES, TABLE4_SYSTEMS)
    assignment = assign(comparisons, TABLE4_ANNOTATORS, 150, seed=TABLE4_SEED)
    annotator_of = {
        comparison_id: annotator
        for annotator, ids in assignment.items()
        for comparison_id in ids
    }
    index = {system: i for i, system in enumerate(TABLE4_SYSTEMS)}
    judgments = []
    for comparison in comparisons:
        i, j = index[comparison.system_a], index[comparison.system_b]
        k = TABLE4_SOURCES.index(comparison.source_id)
        if k < TABLE4_WINS[i][j]:
            verdict = Verdict.A
        elif k < TABLE4_WINS[i][j] + TABLE4_WINS[j][i]:
            verdict = Verdict.B
        else:
            verdict = Verdict.TIE
        judgments.append(
            Judgment(
                comparison_id=comparison.id,
                verdict=verdict,
                annotator_id=annotator_of[comparison.id],
                timestamp=0.0,
            )
        )
    return judgments


def build_table4() -> None:
    table4 = FIXTURES / "table4"
    table4.mkdir(parents=True, exist_ok=True)
    comparisons = schedule(TABLE4_SOURCES, TABLE4_SYSTEMS)
    write_jsonl(
        table4 / "comparisons.jsonl",
        (comparison_to_record(c) for c in comparisons),
    )
    write_jsonl(
        table4 / "assignment.jsonl",
        assignment_to_records(
            assign(comparisons, TABLE4_ANNOTATORS, 150, seed=TABLE4_SEED)
        ),
    )
    write_jsonl(
        table4 / "judgments.jsonl",
        (judgment_to_record(j) for j in table4_judgments()),
    )


def main() -> None:
    build_sample()
    build_table4()
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
