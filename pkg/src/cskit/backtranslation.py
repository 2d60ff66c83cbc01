"""Back-translation: prompts, generation backends, and silver-pair assembly.

Code-switched sentences go out to a pluggable text-in/text-out backend
as monolingual-translation prompts; accepted outputs come back as silver
ParallelPairs, with meta-prefaced or profane outputs discarded.
"""

from __future__ import annotations

import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .errors import BackendError, SplitMismatchError, UnknownIdError
from .model import ParallelPair, Provenance, Split
from .preprocess import PreprocessedSentence

#: Instruction presets. ``body`` and ``table6`` differ in one clause
#: ("English" vs "Spanish"); both ship because the source material is
#: internally inconsistent about which wording won.
INSTRUCTION_PRESETS = {
    "body": (
        "Now convert this code-switched phrase to English. Leave the parts "
        "in English as they are, focus on translating the parts in Spanish."
    ),
    "table6": (
        "Convert this code-switched phrase to English. Leave the parts in "
        "Spanish as they are, focus on translating the parts in Spanish."
    ),
    "plain": "Convert this code-switched phrase to English.",
    "no-spelling": (
        "Convert this code-switched phrase to English without correcting "
        "the original spelling, focus on translating the parts in Spanish."
    ),
}

DEFAULT_INSTRUCTION = INSTRUCTION_PRESETS["body"]

#: Start-anchored, case-insensitive prefixes that mark a meta-preface.
DEFAULT_META_PREFACES = (
    "of course",
    "here's your translation",
    "sure,",
    "here is the translation",
)


class GenerationBackend(Protocol):
    """Text-in/text-out translation backend."""

    identity: str

    def generate(self, prompt: str) -> str: ...


#: Small canned Spanish-to-English word table for the deterministic mock.
MOCK_LEXICON = {
    "quiero": "i want",
    "estaba": "i was",
    "aquí": "here",
    "pero": "but",
    "porque": "because",
    "que": "that",
    "como": "how",
    "todos": "everyone",
    "nada": "nothing",
    "mis": "my",
    "tan": "so",
    "muy": "very",
    "bien": "well",
    "casa": "house",
    "ahora": "now",
    "siempre": "always",
    "gente": "people",
    "dinero": "money",
    "trabajo": "work",
    "no": "not",
}


@dataclass
class MockBackend:
    """Deterministic backend: word-table translation of the prompt's last line.

    Relies on build_backtranslation_prompt placing the sentence on the
    final line. Tokens found in the lexicon (case-insensitive, edge
    punctuation preserved) are replaced; everything else passes through.
    """

    lexicon: dict[str, str] = field(default_factory=lambda: dict(MOCK_LEXICON))
    identity: str = "mock"

    def generate(self, prompt: str) -> str:
        sentence = prompt.splitlines()[-1] if prompt else ""
        out_words = []
        for word in sentence.split(" "):
            core = word.strip(".,!?;:\"'()[]¿¡")
            replacement = self.lexicon.get(core.lower())
            if replacement is not None and core:
                word = word.replace(core, replacement, 1)
            out_words.append(word)
        return " ".join(out_words)


@dataclass
class HttpBackend:
    """One POST per sentence: the prompt as plain text, the body as reply.

    No retries; retry policy belongs to the caller.
    """

    endpoint: str
    timeout: float = 30.0
    identity: str = "http"

    def generate(self, prompt: str) -> str:
        request = urllib.request.Request(
            self.endpoint,
            data=prompt.encode("utf-8"),
            headers={"Content-Type": "text/plain; charset=utf-8"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                return response.read().decode("utf-8")
        except Exception as exc:
            raise BackendError(f"backend request failed: {exc}") from exc


@dataclass(frozen=True)
class PromptSpec:
    instruction: str = DEFAULT_INSTRUCTION
    shots: tuple[tuple[str, str], ...] = ()
    target_language: str = "English"

    def __post_init__(self) -> None:
        if len(self.shots) not in (0, 1, 5):
            raise ValueError(f"shots length must be 0, 1, or 5, got {len(self.shots)}")


@dataclass(frozen=True)
class OutputFilterConfig:
    meta_preface_patterns: tuple[str, ...] = DEFAULT_META_PREFACES
    profanity_list: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if any(not p for p in self.meta_preface_patterns):
            raise ValueError("meta preface patterns must be non-empty strings")


def build_backtranslation_prompt(cs_text: str, spec: PromptSpec = PromptSpec()) -> str:
    """Assemble the few-shot translation prompt for one sentence.

    k-shot layout: header, k example pairs (code-switched line, then its
    monolingual line), instruction, sentence. 0-shot drops the header and
    examples. The sentence is always the final line.
    """
    if not cs_text:
        raise ValueError("cs_text must be non-empty")
    lines: list[str] = []
    if spec.shots:
        lines.append(
            f"Here are {len(spec.shots)} examples of a code-switched text "
            f"that has been converted to {spec.target_language}:"
        )
        for shot_cs, shot_en in spec.shots:
            lines.append(shot_cs)
            lines.append(shot_en)
            lines.append("")
    lines.append(spec.instruction)
    lines.append(cs_text)
    return "\n".join(lines)


@dataclass(frozen=True)
class FilterOutcome:
    accepted: bool
    text: str | None = None
    reason: str | None = None


def filter_translation_output(
    raw: str, config: OutputFilterConfig = OutputFilterConfig()
) -> FilterOutcome:
    """Accept a trimmed translation, or discard it with a reason.

    Discards: "meta" when the output starts with a task mention, and
    "profanity" when any listed term occurs as a whole word. The filter
    is inert until a profanity list is supplied.
    """
    trimmed = raw.strip()
    lowered = trimmed.lower()
    for pattern in config.meta_preface_patterns:
        if lowered.startswith(pattern.lower()):
            return FilterOutcome(accepted=False, reason="meta")
    if config.profanity_list:
        words = {w.strip(".,!?;:\"'()[]¿¡").lower() for w in trimmed.split()}
        for term in config.profanity_list:
            if term.lower() in words:
                return FilterOutcome(accepted=False, reason="profanity")
    return FilterOutcome(accepted=True, text=trimmed)


@dataclass(frozen=True)
class DiscardEntry:
    id: str
    reason: str


def build_parallel_corpus(
    sentences: Sequence[PreprocessedSentence],
    backend: GenerationBackend,
    spec: PromptSpec = PromptSpec(),
    config: OutputFilterConfig = OutputFilterConfig(),
    max_workers: int = 1,
) -> tuple[list[ParallelPair], list[DiscardEntry]]:
    """Back-translate every sentence; return silver pairs plus a discard log.

    One backend call per sentence. Backend failures become "backend"
    discard entries and the run continues. Output order matches input
    order regardless of worker count, and
    ``len(pairs) + len(discards) == len(sentences)``.
    """

    def translate(sentence: PreprocessedSentence) -> str | BackendError:
        prompt = build_backtranslation_prompt(sentence.text, spec)
        try:
            return backend.generate(prompt)
        except Exception as exc:
            return BackendError(str(exc))

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            raw_outputs = list(pool.map(translate, sentences))
    else:
        raw_outputs = [translate(s) for s in sentences]

    pairs: list[ParallelPair] = []
    discards: list[DiscardEntry] = []
    for sentence, raw in zip(sentences, raw_outputs):
        if isinstance(raw, BackendError):
            discards.append(DiscardEntry(sentence.id, "backend"))
            continue
        outcome = filter_translation_output(raw, config)
        if not outcome.accepted:
            discards.append(DiscardEntry(sentence.id, outcome.reason or "discard"))
            continue
        if not outcome.text:
            discards.append(DiscardEntry(sentence.id, "empty"))
            continue
        pairs.append(
            ParallelPair(
                id=sentence.id,
                cs_text=sentence.text,
                en_text=outcome.text,
                provenance=Provenance.SILVER,
                split=sentence.split,
            )
        )
    return pairs, discards


@dataclass(frozen=True)
class GoldEdit:
    """One post-edition action: replace the English side, or remove the pair."""

    id: str
    en_text: str | None = None
    remove: bool = False

    def __post_init__(self) -> None:
        if self.remove == (self.en_text is not None):
            raise ValueError("an edit carries either en_text or remove, not both")


def import_gold(
    pairs: Sequence[ParallelPair], edits: Iterable[GoldEdit]
) -> list[ParallelPair]:
    """Apply human post-edition results to test-split pairs.

    Edited pairs become gold with the corrected English text; removed
    pairs drop out; untouched pairs pass through unchanged.
    """
    by_id = {pair.id: pair for pair in pairs}
    edited: dict[str, ParallelPair | None] = {}
    for edit in edits:
        pair = by_id.get(edit.id)
        if pair is None:
            raise UnknownIdError(f"edit references unknown pair id {edit.id!r}")
        if pair.split is not Split.TEST:
            raise SplitMismatchError(
                f"edit targets pair {edit.id!r} on split {pair.split.value}, "
                "but post-edition applies to the test split only"
            )
        if edit.remove:
            edited[edit.id] = None
        else:
            edited[edit.id] = ParallelPair(
                id=pair.id,
                cs_text=pair.cs_text,
                en_text=edit.en_text or "",
                provenance=Provenance.GOLD,
                split=pair.split,
            )
    result: list[ParallelPair] = []
    for pair in pairs:
        if pair.id in edited:
            replacement = edited[pair.id]
            if replacement is not None:
                result.append(replacement)
        else:
            result.append(pair)
    return result
