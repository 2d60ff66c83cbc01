"""Core domain types: tagged utterances, parallel pairs, and system outputs.

All values are immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .errors import UnknownTagError


class LanguageTag(str, Enum):
    ENG = "eng"
    SPA = "spa"
    MIXED = "mixed"
    AMBIGUOUS = "ambiguous"
    NE = "ne"
    FW = "fw"
    OTHER = "other"
    UNK = "unk"


class Split(str, Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"


class Provenance(str, Enum):
    SILVER = "silver"
    GOLD = "gold"


#: Default mapping from input tag literals to canonical tags. Release
#: variants of token-level LID data disagree on literals, so the mapping
#: is configuration, not code.
DEFAULT_TAG_ALIASES: Mapping[str, LanguageTag] = {
    "eng": LanguageTag.ENG,
    "spa": LanguageTag.SPA,
    "eng&spa": LanguageTag.MIXED,
    "lang1": LanguageTag.ENG,
    "lang2": LanguageTag.SPA,
    "ne": LanguageTag.NE,
    "ambiguous": LanguageTag.AMBIGUOUS,
    "fw": LanguageTag.FW,
    "other": LanguageTag.OTHER,
    "unk": LanguageTag.UNK,
}


@dataclass(frozen=True)
class TagAliases:
    """Total mapping on the configured alias set; errors elsewhere."""

    aliases: Mapping[str, LanguageTag] = field(
        default_factory=lambda: dict(DEFAULT_TAG_ALIASES)
    )

    def resolve(self, literal: str) -> LanguageTag:
        try:
            return self.aliases[literal]
        except KeyError:
            raise UnknownTagError(literal) from None


@dataclass(frozen=True)
class Token:
    surface: str
    tag: LanguageTag

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class TaggedUtterance:
    id: str
    split: Split
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("utterance id must be non-empty")
        if not self.tokens:
            raise ValueError(f"utterance {self.id}: token sequence is empty")
        object.__setattr__(self, "tokens", tuple(self.tokens))


@dataclass(frozen=True)
class ParallelPair:
    """A code-switched sentence paired with its monolingual English side."""

    id: str
    cs_text: str
    en_text: str
    provenance: Provenance
    split: Split


@dataclass(frozen=True)
class SystemOutput:
    """One generation system's raw and truncated output for one source."""

    source_id: str
    system_id: str
    raw: str
    truncated: str

    def __post_init__(self) -> None:
        if not self.raw.startswith(self.truncated):
            raise ValueError(
                f"truncated output for {self.source_id}/{self.system_id} "
                "is not a prefix of the raw output"
            )


def validate_pair(pair: ParallelPair) -> list[str]:
    """Check every ParallelPair invariant; violations are data, not failures.

    Returns an empty list when the pair is well-formed.
    """
    violations = []
    if not pair.id:
        violations.append("empty id")
    if not pair.cs_text:
        violations.append("empty code-switched side")
    if not pair.en_text:
        violations.append("empty English side")
    if pair.provenance is Provenance.GOLD and pair.split is not Split.TEST:
        violations.append("gold outside test")
    return violations
