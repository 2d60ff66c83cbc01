"""Pairwise preference tournament: scheduling, assignment, and scoring.

Every source sentence turns into one comparison per unordered system
pair; a win is worth 1 point, a loss 0, and a tie 0.5 each, so total
points always equal the number of judged comparisons.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import UnknownIdError


class Verdict(str, Enum):
    A = "a"
    B = "b"
    TIE = "tie"


@dataclass(frozen=True)
class Comparison:
    """One blind matchup; systems stored in lexicographic order."""

    id: str
    source_id: str
    system_a: str
    system_b: str

    def __post_init__(self) -> None:
        if self.system_a == self.system_b:
            raise ValueError(f"comparison {self.id!r} pits a system against itself")

    def systems(self) -> tuple[str, str]:
        return self.system_a, self.system_b


@dataclass(frozen=True)
class Judgment:
    comparison_id: str
    verdict: Verdict
    annotator_id: str
    timestamp: float = 0.0


def comparison_id(source_id: str, system_a: str, system_b: str) -> str:
    """Deterministic but opaque id; it is served to annotators as the
    task id, so it must not reveal the matched systems or the source."""
    digest = hashlib.sha256(f"{source_id}|{system_a}|{system_b}".encode()).hexdigest()
    return f"c{digest[:16]}"


def schedule(
    source_ids: Sequence[str], system_ids: Sequence[str]
) -> list[Comparison]:
    """One comparison per source per unordered system pair.

    Count = len(sources) * C(len(systems), 2). Ids are deterministic
    content hashes over (source, sorted pair).
    """
    systems = list(dict.fromkeys(system_ids))
    if len(systems) < 2:
        raise ValueError(f"need at least 2 distinct systems, got {len(systems)}")
    if not source_ids:
        raise ValueError("need at least one source")
    if len(set(source_ids)) != len(source_ids):
        raise ValueError("source ids must be unique")
    ordered = sorted(systems)
    comparisons = []
    for source_id in source_ids:
        for i, system_a in enumerate(ordered):
            for system_b in ordered[i + 1 :]:
                comparisons.append(
                    Comparison(
                        id=comparison_id(source_id, system_a, system_b),
                        source_id=source_id,
                        system_a=system_a,
                        system_b=system_b,
                    )
                )
    return comparisons


def assign(
    comparisons: Sequence[Comparison],
    annotator_ids: Sequence[str],
    per_annotator: int,
    seed: int,
) -> dict[str, list[str]]:
    """Seeded uniform random partition of comparisons across annotators.

    Every comparison is assigned exactly once; equal seeds reproduce the
    same partition.
    """
    if len(set(annotator_ids)) != len(annotator_ids):
        raise ValueError("annotator ids must be unique")
    expected = len(annotator_ids) * per_annotator
    if expected != len(comparisons):
        raise ValueError(
            f"{len(annotator_ids)} annotators x {per_annotator} = {expected} "
            f"does not partition {len(comparisons)} comparisons"
        )
    comparison_ids = [c.id for c in comparisons]
    random.Random(seed).shuffle(comparison_ids)
    return {
        annotator: comparison_ids[i * per_annotator : (i + 1) * per_annotator]
        for i, annotator in enumerate(annotator_ids)
    }


@dataclass(frozen=True)
class ScoreTable:
    points: Mapping[str, float]

    def total(self) -> float:
        return sum(self.points.values())

    def ranking(self) -> list[tuple[int, str, float]]:
        """Competition ranking: equal points share the lower rank number."""
        ordered = sorted(self.points.items(), key=lambda kv: (-kv[1], kv[0]))
        ranked = []
        for position, (system, points) in enumerate(ordered, start=1):
            if ranked and points == ranked[-1][2]:
                rank = ranked[-1][0]
            else:
                rank = position
            ranked.append((rank, system, points))
        return ranked


def score(
    judgments: Iterable[Judgment], comparisons: Sequence[Comparison]
) -> ScoreTable:
    """Fold judgments into points: win 1, loss 0, tie 0.5 each."""
    by_id = {c.id: c for c in comparisons}
    points: dict[str, float] = {}
    for comparison in comparisons:
        points.setdefault(comparison.system_a, 0.0)
        points.setdefault(comparison.system_b, 0.0)
    for judgment in judgments:
        comparison = by_id.get(judgment.comparison_id)
        if comparison is None:
            raise UnknownIdError(
                f"judgment references unknown comparison {judgment.comparison_id!r}"
            )
        if judgment.verdict is Verdict.A:
            points[comparison.system_a] += 1.0
        elif judgment.verdict is Verdict.B:
            points[comparison.system_b] += 1.0
        else:
            points[comparison.system_a] += 0.5
            points[comparison.system_b] += 0.5
    return ScoreTable(points)


def metric_tournament(
    per_instance_values: Mapping[tuple[str, str], float],
    source_ids: Sequence[str],
    system_ids: Sequence[str],
    tie_epsilon: float = 1e-9,
    annotator_id: str = "metric",
) -> list[Judgment]:
    """Simulate the tournament with a metric as the judge.

    For every scheduled comparison the higher per-instance value wins;
    differences within tie_epsilon are ties.
    """
    judgments = []
    for comparison in schedule(source_ids, system_ids):
        try:
            value_a = per_instance_values[(comparison.source_id, comparison.system_a)]
            value_b = per_instance_values[(comparison.source_id, comparison.system_b)]
        except KeyError as exc:
            raise UnknownIdError(f"no metric value for instance {exc.args[0]!r}") from None
        if abs(value_a - value_b) <= tie_epsilon:
            verdict = Verdict.TIE
        elif value_a > value_b:
            verdict = Verdict.A
        else:
            verdict = Verdict.B
        judgments.append(Judgment(comparison.id, verdict, annotator_id))
    return judgments


def instance_scores(
    judgments: Iterable[Judgment],
    comparisons: Sequence[Comparison],
    exclude_systems: frozenset[str] = frozenset(),
) -> dict[tuple[str, str], float]:
    """Per-(source, system) round-robin points, the unit fed to correlation.

    Comparisons involving an excluded system (typically the reference)
    contribute nothing, and excluded systems get no entries. Sources with
    no judgments keep all-zero scores.
    """
    by_id = {c.id: c for c in comparisons}
    scores: dict[tuple[str, str], float] = {}
    for comparison in comparisons:
        for system in comparison.systems():
            if system not in exclude_systems:
                scores.setdefault((comparison.source_id, system), 0.0)
    for judgment in judgments:
        comparison = by_id.get(judgment.comparison_id)
        if comparison is None:
            raise UnknownIdError(
                f"judgment references unknown comparison {judgment.comparison_id!r}"
            )
        if exclude_systems & set(comparison.systems()):
            continue
        key_a = (comparison.source_id, comparison.system_a)
        key_b = (comparison.source_id, comparison.system_b)
        if judgment.verdict is Verdict.A:
            scores[key_a] += 1.0
        elif judgment.verdict is Verdict.B:
            scores[key_b] += 1.0
        else:
            scores[key_a] += 0.5
            scores[key_b] += 0.5
    return scores
