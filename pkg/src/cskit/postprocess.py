"""Output truncation: cut over-generated text at the best punctuation mark.

Generation systems tend to produce the wanted sentence up to a
punctuation mark and then start over or hallucinate; the fix is to keep
the punctuation-terminated prefix whose length is closest to the source
sentence's. Length is measured in characters, which needs no tokenizer
and is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_PUNCTUATION = frozenset(".!?,;:…")


@dataclass(frozen=True)
class TruncationConfig:
    punctuation_set: frozenset[str] = DEFAULT_PUNCTUATION

    def __post_init__(self) -> None:
        if not self.punctuation_set:
            raise ValueError("punctuation_set must be non-empty")


def candidate_cut_points(raw: str, config: TruncationConfig = TruncationConfig()) -> list[int]:
    """Prefix lengths ending right after a punctuation character, plus len(raw).

    The full text is always a candidate so an under-generating system is
    never over-truncated.
    """
    punct = config.punctuation_set
    cuts = [i + 1 for i, ch in enumerate(raw) if ch in punct]
    if not cuts or cuts[-1] != len(raw):
        cuts.append(len(raw))
    return cuts


def truncate_output(
    raw: str, source: str, config: TruncationConfig = TruncationConfig()
) -> str:
    """Return the prefix of raw whose length best matches the source.

    Minimizes ``abs(len(prefix) - len(source))`` over all candidate cut
    points; ties break toward the shorter prefix. The result is
    right-trimmed of trailing whitespace.
    """
    if not raw:
        raise ValueError("raw output must be non-empty")
    target = len(source)
    best = min(candidate_cut_points(raw, config), key=lambda n: (abs(n - target), n))
    return raw[:best].rstrip()
