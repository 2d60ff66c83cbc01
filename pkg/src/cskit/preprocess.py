"""Cleaning, detokenization, and the code-switching filter.

Turns token/tag utterances into natural sentences and keeps only those
that actually switch languages: at least ``min_words_per_language``
alphabetic words in each countable language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .model import LanguageTag, Split, TaggedUtterance, Token

if TYPE_CHECKING:
    from .ingest import RawCorpus

# Scheme-prefixed or www.-prefixed, up to the next whitespace.
_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.-]*://|www\.)\S*")

# @handle at string start or after whitespace; mid-token @ is left alone.
_USERNAME_RE = re.compile(r"(?:(?<=\s)|^)@\w+")

_WHITESPACE_RE = re.compile(r"\s+")

# Punctuation that attaches to the preceding token.
_ATTACH_LEFT = set(".,!?;:%)]”’")
# Punctuation that attaches to the following token.
_ATTACH_RIGHT = set("([“‘¿¡$")
# English contraction particles; attach to the preceding token.
_CONTRACTIONS = {"n't", "'s", "'m", "'re", "'ll", "'ve", "'d"}
_CONTRACTIONS |= {c.replace("'", "’") for c in _CONTRACTIONS}


@dataclass(frozen=True)
class PreprocessConfig:
    min_words_per_language: int = 2
    countable_tags: frozenset[LanguageTag] = frozenset(
        {LanguageTag.ENG, LanguageTag.SPA}
    )
    username_placeholder: str = "<user>"

    def __post_init__(self) -> None:
        if self.min_words_per_language < 1:
            raise ValueError("min_words_per_language must be >= 1")


def strip_links(text: str) -> str:
    """Delete URLs and collapse the whitespace they leave behind."""
    stripped = _URL_RE.sub("", text)
    return _WHITESPACE_RE.sub(" ", stripped).strip()


def mask_usernames(text: str, placeholder: str = "<user>") -> str:
    """Replace @handles with the placeholder; addresses like a@b.com survive."""
    return _USERNAME_RE.sub(placeholder, text)


def detokenize(tokens: Sequence[Token]) -> str:
    """Reattach punctuation and contractions to produce natural text.

    Joins surfaces with single spaces, then drops the space before
    left-attaching tokens (closing punctuation, contraction particles)
    and after right-attaching ones (opening punctuation). Alphabetic
    characters are never altered.
    """
    if not tokens:
        raise ValueError("cannot detokenize an empty token sequence")
    pieces: list[str] = []
    suppress_space = True  # never a space before the first token
    for token in tokens:
        surface = token.surface
        attach_left = (
            all(ch in _ATTACH_LEFT for ch in surface)
            or surface.lower() in _CONTRACTIONS
        )
        if not suppress_space and not attach_left:
            pieces.append(" ")
        pieces.append(surface)
        suppress_space = all(ch in _ATTACH_RIGHT for ch in surface)
    return "".join(pieces)


def _countable_words(
    utterance: TaggedUtterance, config: PreprocessConfig
) -> dict[LanguageTag, int]:
    counts: dict[LanguageTag, int] = {tag: 0 for tag in config.countable_tags}
    for token in utterance.tokens:
        if token.tag in counts and any(ch.isalpha() for ch in token.surface):
            counts[token.tag] += 1
    return counts


def is_code_switched(
    utterance: TaggedUtterance, config: PreprocessConfig = PreprocessConfig()
) -> bool:
    """True iff every countable language has enough alphabetic words.

    Tokens tagged ne, mixed, ambiguous, fw, other, or unk never count
    toward either language, and neither do punctuation or digit tokens.
    """
    counts = _countable_words(utterance, config)
    return all(n >= config.min_words_per_language for n in counts.values())


def clean_text(text: str, config: PreprocessConfig = PreprocessConfig()) -> str:
    return strip_links(mask_usernames(text, config.username_placeholder))


@dataclass(frozen=True)
class PreprocessedSentence:
    id: str
    split: Split
    text: str


def preprocess_pipeline(
    corpus: RawCorpus, config: PreprocessConfig = PreprocessConfig()
) -> list[PreprocessedSentence]:
    """Detokenize, clean, and filter a corpus down to natural CS sentences.

    Utterances that fail the code-switching filter or whose text becomes
    empty after link stripping are dropped; order is preserved per split.
    """
    survivors: list[PreprocessedSentence] = []
    for split in (Split.TRAIN, Split.DEV, Split.TEST):
        for utterance in corpus.splits.get(split, ()):
            if not is_code_switched(utterance, config):
                continue
            text = clean_text(detokenize(utterance.tokens), config)
            if not text:
                continue
            survivors.append(PreprocessedSentence(utterance.id, split, text))
    return survivors
