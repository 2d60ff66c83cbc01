"""Error typology for code-switching generation plus per-system aggregation.

Three groups: code-switching errors (the output fails to switch or
switches unnaturally), translation errors (meaning, grammar, fluency),
and format errors (harmless surface damage).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

ERROR_GROUPS: Mapping[str, tuple[str, ...]] = {
    "cs": (
        "no_cs",
        "unnatural_cs",
        "repetition_both_languages",
    ),
    "translation": (
        "made_up_words",
        "wrong_translation",
        "wrong_conjugation",
        "wrong_agreement",
        "wrong_meaning",
        "wrong_order",
        "wrong_tense",
        "unintelligible",
        "instruction_misunderstanding",
    ),
    "format": (
        "extra_words",
        "extra_characters",
        "hallucinations",
        "start_over",
        "duplications",
    ),
}

CODE_TO_GROUP: Mapping[str, str] = {
    code: group for group, codes in ERROR_GROUPS.items() for code in codes
}


@dataclass(frozen=True)
class ErrorCode:
    group: str
    code: str

    @classmethod
    def from_code(cls, code: str) -> "ErrorCode":
        group = CODE_TO_GROUP.get(code)
        if group is None:
            raise ValueError(f"unknown error code {code!r}")
        return cls(group=group, code=code)


@dataclass(frozen=True)
class ErrorAnnotation:
    """Multi-label error record for one (source, system) output.

    An empty code set means the output was inspected and found error-free.
    """

    source_id: str
    system_id: str
    codes: frozenset[ErrorCode] = frozenset()


def validate_annotation(annotation: ErrorAnnotation) -> list[str]:
    """Every unknown code or group/code mismatch, as data."""
    violations = []
    for error in annotation.codes:
        expected_group = CODE_TO_GROUP.get(error.code)
        if expected_group is None:
            violations.append(f"unknown code {error.code!r}")
        elif error.group != expected_group:
            violations.append(
                f"code {error.code!r} filed under group {error.group!r}, "
                f"belongs to {expected_group!r}"
            )
    return violations


@dataclass(frozen=True)
class SystemErrorProfile:
    system_id: str
    annotated_instances: int
    code_counts: Mapping[str, int]
    group_counts: Mapping[str, int]  # instances with >= 1 code in the group
    group_shares: Mapping[str, float]  # percent of instance-group incidences


def aggregate(annotations: Iterable[ErrorAnnotation]) -> list[SystemErrorProfile]:
    """Count errors per system, by code and by group.

    An instance with k codes feeds k code counts; a group counts an
    instance once however many of its codes it shows. Shares divide each
    group count by the system's total instance-group incidences, so an
    instance with errors in two groups counts once per group.
    """
    seen: set[tuple[str, str]] = set()
    per_system: dict[str, list[ErrorAnnotation]] = {}
    for annotation in annotations:
        key = (annotation.source_id, annotation.system_id)
        if key in seen:
            raise ValueError(
                f"duplicate annotation for source {annotation.source_id!r} "
                f"/ system {annotation.system_id!r}"
            )
        seen.add(key)
        bad = validate_annotation(annotation)
        if bad:
            raise ValueError(f"invalid annotation for {key}: {'; '.join(bad)}")
        per_system.setdefault(annotation.system_id, []).append(annotation)

    profiles = []
    for system_id in sorted(per_system):
        system_annotations = per_system[system_id]
        code_counts = {code: 0 for codes in ERROR_GROUPS.values() for code in codes}
        group_counts = {group: 0 for group in ERROR_GROUPS}
        for annotation in system_annotations:
            groups_here = set()
            for error in annotation.codes:
                code_counts[error.code] += 1
                groups_here.add(error.group)
            for group in groups_here:
                group_counts[group] += 1
        incidences = sum(group_counts.values())
        group_shares = {
            group: (100.0 * count / incidences) if incidences else 0.0
            for group, count in group_counts.items()
        }
        profiles.append(
            SystemErrorProfile(
                system_id=system_id,
                annotated_instances=len(system_annotations),
                code_counts=code_counts,
                group_counts=group_counts,
                group_shares=group_shares,
            )
        )
    return profiles


def error_subsets(
    annotations: Iterable[ErrorAnnotation],
) -> dict[str, set[tuple[str, str]]]:
    """Instance index sets per error group, for correlation-by-error-type.

    An instance lands in every group it has a code in; error-free
    instances land nowhere.
    """
    subsets: dict[str, set[tuple[str, str]]] = {group: set() for group in ERROR_GROUPS}
    for annotation in annotations:
        for error in annotation.codes:
            subsets[error.group].add((annotation.source_id, annotation.system_id))
    return subsets
