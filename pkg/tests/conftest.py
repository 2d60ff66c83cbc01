from __future__ import annotations

from pathlib import Path

import pytest

from cskit.model import LanguageTag, Split, TaggedUtterance, Token

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def utterance(spec: str, split: Split = Split.TRAIN, uid: str = "u-1") -> TaggedUtterance:
    """Compact builder: "estaba/spa aquí/spa three/eng ./eng&spa"."""
    aliases = {"eng&spa": LanguageTag.MIXED}
    tokens = []
    for part in spec.split():
        surface, _, tag = part.rpartition("/")
        tokens.append(
            Token(surface=surface, tag=aliases.get(tag) or LanguageTag(tag))
        )
    return TaggedUtterance(id=uid, split=split, tokens=tuple(tokens))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
