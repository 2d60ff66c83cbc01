"""Parse token/tag files into corpora and deduplicate across splits.

Input format: UTF-8 text, one token per line as ``surface<TAB>tag``,
blank line between utterances. The field separator is a single tab;
space-separated lines are rejected, not guessed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConllParseError
from .model import Split, TagAliases, TaggedUtterance, Token
from .preprocess import detokenize

#: Splits in survivor-priority order for cross-split deduplication.
SPLIT_PRIORITY = (Split.TEST, Split.DEV, Split.TRAIN)

#: Natural presentation order for serialized corpora.
SPLIT_ORDER = (Split.TRAIN, Split.DEV, Split.TEST)


@dataclass(frozen=True)
class RawCorpus:
    splits: dict[Split, tuple[TaggedUtterance, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for split, utterances in self.splits.items():
            seen: set[str] = set()
            for utterance in utterances:
                if utterance.id in seen:
                    raise ValueError(
                        f"duplicate utterance id {utterance.id!r} in split {split.value}"
                    )
                seen.add(utterance.id)

    def size(self, split: Split) -> int:
        return len(self.splits.get(split, ()))

    def all_utterances(self) -> list[TaggedUtterance]:
        return [u for split in SPLIT_ORDER for u in self.splits.get(split, ())]


def parse_conll(
    content: str,
    split: Split,
    aliases: TagAliases = TagAliases(),
    id_prefix: str | None = None,
) -> list[TaggedUtterance]:
    """Parse blank-line-delimited token/tag blocks into utterances.

    Ids are assigned sequentially as ``{split}-{n:06d}``. Raises
    ConllParseError (with the line number) on malformed lines and
    UnknownTagError on literals outside the alias table.
    """
    prefix = id_prefix if id_prefix is not None else split.value
    utterances: list[TaggedUtterance] = []
    tokens: list[Token] = []

    def flush() -> None:
        if tokens:
            utterances.append(
                TaggedUtterance(
                    id=f"{prefix}-{len(utterances) + 1:06d}",
                    split=split,
                    tokens=tuple(tokens),
                )
            )
            tokens.clear()

    for line_number, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ConllParseError(
                line_number,
                f"expected 'surface<TAB>tag', got {len(fields)} field(s): {line!r}",
            )
        surface, literal = fields
        if not surface or surface != surface.strip():
            raise ConllParseError(line_number, f"bad token surface: {surface!r}")
        tokens.append(Token(surface=surface, tag=aliases.resolve(literal.strip())))
    flush()
    return utterances


def normalized_text(utterance: TaggedUtterance) -> str:
    """Dedup key: lowercased, whitespace-collapsed detokenized form."""
    return re.sub(r"\s+", " ", detokenize(utterance.tokens).lower()).strip()


def deduplicate(corpus: RawCorpus) -> RawCorpus:
    """Drop utterances whose normalized text already occurred.

    Cross-split duplicates survive in the higher-priority split
    (test > dev > train); within a split the first occurrence survives.
    Idempotent, and never increases any split's size.
    """
    seen: set[str] = set()
    kept: dict[Split, tuple[TaggedUtterance, ...]] = {}
    for split in SPLIT_PRIORITY:
        if split not in corpus.splits:
            continue
        survivors = []
        for utterance in corpus.splits[split]:
            key = normalized_text(utterance)
            if key in seen:
                continue
            seen.add(key)
            survivors.append(utterance)
        kept[split] = tuple(survivors)
    # Preserve the caller's split ordering.
    return RawCorpus(
        splits={split: kept[split] for split in corpus.splits if split in kept}
    )
