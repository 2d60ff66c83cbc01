"""Reference-based generation metrics: BLEU, chrF, and embedding F-score.

The word tokenizer is an internal frozen rule (separate punctuation from
words, split on whitespace, case-sensitive); no parity with any external
evaluation library is claimed. Sentence-level BLEU applies add-one
smoothing to zero counts at orders >= 2 so per-instance values do not
collapse to ties; corpus BLEU applies none.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

import numpy as np

from .errors import BackendError, UnknownIdError
from .model import ParallelPair, SystemOutput

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

BLEU_MAX_ORDER = 4
CHRF_MAX_ORDER = 6
CHRF_BETA = 2.0


class Metric(str, Enum):
    BLEU = "bleu"
    CHRF = "chrf"
    EMBED_F = "embed_f"


_RANGES = {Metric.BLEU: 100.0, Metric.CHRF: 100.0, Metric.EMBED_F: 1.0}


@dataclass(frozen=True)
class MetricValue:
    metric: Metric
    value: float

    def __post_init__(self) -> None:
        upper = _RANGES[self.metric]
        if not 0.0 <= self.value <= upper:
            raise ValueError(
                f"{self.metric.value} value {self.value} outside [0, {upper}]"
            )


def tokenize(text: str) -> list[str]:
    """Separate punctuation from words, then split on whitespace."""
    return _TOKEN_RE.findall(text)


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def _bleu_sufficient_stats(
    candidate_tokens: Sequence[str], reference_tokens: Sequence[str]
) -> tuple[list[int], list[int]]:
    """Clipped match counts and totals for orders 1..4."""
    correct, total = [], []
    for order in range(1, BLEU_MAX_ORDER + 1):
        cand_counts = _ngram_counts(candidate_tokens, order)
        ref_counts = _ngram_counts(reference_tokens, order)
        correct.append(
            sum(min(count, ref_counts[ngram]) for ngram, count in cand_counts.items())
        )
        total.append(sum(cand_counts.values()))
    return correct, total


def _bleu_from_stats(
    correct: Sequence[int],
    total: Sequence[int],
    candidate_length: int,
    reference_length: int,
    smooth: bool,
) -> float:
    log_precisions = []
    for n in range(BLEU_MAX_ORDER):
        if total[n] == 0:
            continue  # order absent from the candidate, excluded from the mean
        if correct[n] == 0:
            if not smooth or n == 0:
                return 0.0
            log_precisions.append(math.log(1.0 / (total[n] + 1)))
        else:
            log_precisions.append(math.log(correct[n] / total[n]))
    if not log_precisions:
        return 0.0
    geometric_mean = math.exp(sum(log_precisions) / len(log_precisions))
    brevity_penalty = 1.0
    if candidate_length < reference_length:
        brevity_penalty = math.exp(1.0 - reference_length / candidate_length)
    return 100.0 * brevity_penalty * geometric_mean


def sentence_bleu(candidate: str, reference: str) -> MetricValue:
    """Smoothed sentence-level BLEU in [0, 100].

    An empty candidate scores 0.0; a candidate sharing no unigram with
    the reference scores exactly 0.0.
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    candidate_tokens = tokenize(candidate)
    reference_tokens = tokenize(reference)
    if not candidate_tokens:
        return MetricValue(Metric.BLEU, 0.0)
    correct, total = _bleu_sufficient_stats(candidate_tokens, reference_tokens)
    value = _bleu_from_stats(
        correct, total, len(candidate_tokens), len(reference_tokens), smooth=True
    )
    return MetricValue(Metric.BLEU, value)


def corpus_bleu(candidates: Sequence[str], references: Sequence[str]) -> MetricValue:
    """Unsmoothed corpus BLEU over aggregated counts and lengths."""
    if len(candidates) != len(references):
        raise ValueError(
            f"got {len(candidates)} candidates but {len(references)} references"
        )
    if not candidates:
        raise ValueError("corpus BLEU needs at least one candidate/reference pair")
    correct = [0] * BLEU_MAX_ORDER
    total = [0] * BLEU_MAX_ORDER
    candidate_length = 0
    reference_length = 0
    for candidate, reference in zip(candidates, references):
        if not reference:
            raise ValueError("reference must be non-empty")
        candidate_tokens = tokenize(candidate)
        reference_tokens = tokenize(reference)
        candidate_length += len(candidate_tokens)
        reference_length += len(reference_tokens)
        pair_correct, pair_total = _bleu_sufficient_stats(
            candidate_tokens, reference_tokens
        )
        for n in range(BLEU_MAX_ORDER):
            correct[n] += pair_correct[n]
            total[n] += pair_total[n]
    if candidate_length == 0:
        return MetricValue(Metric.BLEU, 0.0)
    value = _bleu_from_stats(
        correct, total, candidate_length, reference_length, smooth=False
    )
    return MetricValue(Metric.BLEU, value)


def _char_ngram_counts(chars: str, order: int) -> Counter:
    return Counter(chars[i : i + order] for i in range(len(chars) - order + 1))


def chrf(candidate: str, reference: str) -> MetricValue:
    """Character n-gram F-score (beta=2, orders 1..6) after whitespace removal.

    Orders with no reference n-grams are skipped from the uniform average.
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    candidate_chars = "".join(candidate.split())
    reference_chars = "".join(reference.split())
    if not candidate_chars:
        return MetricValue(Metric.CHRF, 0.0)
    precisions, recalls = [], []
    for order in range(1, CHRF_MAX_ORDER + 1):
        ref_counts = _char_ngram_counts(reference_chars, order)
        if not ref_counts:
            continue
        cand_counts = _char_ngram_counts(candidate_chars, order)
        matched = sum(
            min(count, ref_counts[ngram]) for ngram, count in cand_counts.items()
        )
        cand_total = sum(cand_counts.values())
        precisions.append(matched / cand_total if cand_total else 0.0)
        recalls.append(matched / sum(ref_counts.values()))
    if not precisions:
        return MetricValue(Metric.CHRF, 0.0)
    precision = sum(precisions) / len(precisions)
    recall = sum(recalls) / len(recalls)
    beta_sq = CHRF_BETA**2
    if precision + recall == 0.0:
        return MetricValue(Metric.CHRF, 0.0)
    value = (
        100.0
        * (1 + beta_sq)
        * precision
        * recall
        / (beta_sq * precision + recall)
    )
    return MetricValue(Metric.CHRF, value)


class EmbeddingBackend(Protocol):
    """Maps a token sequence to one vector per token, fixed dimension."""

    identity: str
    dimension: int

    def embed(self, tokens: Sequence[str]) -> np.ndarray: ...


class OneHotEmbeddingBackend:
    """Deterministic mock: each distinct lowercased surface gets its own axis.

    Cosine similarity is exactly 1.0 for equal surfaces and 0.0 otherwise,
    so the greedy F-score reduces to bag-overlap F1. The vocabulary grows
    per backend instance; exceeding the dimension is an error.
    """

    identity = "one-hot"

    def __init__(self, dimension: int = 4096):
        self.dimension = dimension
        self._vocabulary: dict[str, int] = {}

    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        vectors = np.zeros((len(tokens), self.dimension))
        for row, token in enumerate(tokens):
            index = self._vocabulary.setdefault(token.lower(), len(self._vocabulary))
            if index >= self.dimension:
                raise BackendError(
                    f"one-hot vocabulary exceeded dimension {self.dimension}"
                )
            vectors[row, index] = 1.0
        return vectors


def embed_fscore(
    candidate: str, reference: str, backend: EmbeddingBackend
) -> tuple[float, float, float]:
    """Greedy-matching precision, recall, and F over token embeddings.

    P = mean over candidate tokens of their best cosine similarity to any
    reference token; R symmetric; F = 2PR/(P+R), 0 when P+R = 0.
    """
    candidate_tokens = tokenize(candidate)
    reference_tokens = tokenize(reference)
    if not candidate_tokens or not reference_tokens:
        raise ValueError("both sides must tokenize to at least one token")
    candidate_vectors = np.asarray(backend.embed(candidate_tokens), dtype=float)
    reference_vectors = np.asarray(backend.embed(reference_tokens), dtype=float)
    similarity = _unit_rows(candidate_vectors) @ _unit_rows(reference_vectors).T
    precision = float(similarity.max(axis=1).mean())
    recall = float(similarity.max(axis=0).mean())
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


@dataclass(frozen=True)
class InstanceMetrics:
    source_id: str
    system_id: str
    bleu: float
    chrf: float
    embed_f: float


@dataclass(frozen=True)
class SystemMetrics:
    system_id: str
    bleu: float  # corpus-level
    chrf: float  # mean of sentence values
    embed_f: float  # mean of sentence values


@dataclass(frozen=True)
class MetricReport:
    per_instance: tuple[InstanceMetrics, ...]
    per_system: tuple[SystemMetrics, ...]


def evaluate_systems(
    outputs: Sequence[SystemOutput],
    references: Sequence[ParallelPair],
    backend: EmbeddingBackend,
) -> MetricReport:
    """Score every system's truncated outputs against the code-switched references.

    Per-instance sentence values are retained for tournament and
    correlation use; per-system aggregates are corpus BLEU plus mean chrF
    and mean embedding-F.
    """
    reference_texts = {pair.id: pair.cs_text for pair in references}
    by_system: dict[str, list[SystemOutput]] = {}
    for output in outputs:
        if output.source_id not in reference_texts:
            raise UnknownIdError(
                f"no reference for source_id {output.source_id!r}"
            )
        by_system.setdefault(output.system_id, []).append(output)

    per_instance: list[InstanceMetrics] = []
    per_system: list[SystemMetrics] = []
    for system_id, system_outputs in by_system.items():
        candidates = [o.truncated for o in system_outputs]
        refs = [reference_texts[o.source_id] for o in system_outputs]
        chrf_values, embed_values = [], []
        for output, candidate, ref in zip(system_outputs, candidates, refs):
            chrf_value = chrf(candidate, ref).value
            if tokenize(candidate):
                _, _, f_value = embed_fscore(candidate, ref, backend)
            else:
                f_value = 0.0  # degenerate output, scored as a total miss
            chrf_values.append(chrf_value)
            embed_values.append(f_value)
            per_instance.append(
                InstanceMetrics(
                    source_id=output.source_id,
                    system_id=system_id,
                    bleu=sentence_bleu(candidate, ref).value,
                    chrf=chrf_value,
                    embed_f=f_value,
                )
            )
        per_system.append(
            SystemMetrics(
                system_id=system_id,
                bleu=corpus_bleu(candidates, refs).value,
                chrf=sum(chrf_values) / len(chrf_values),
                embed_f=sum(embed_values) / len(embed_values),
            )
        )
    return MetricReport(tuple(per_instance), tuple(per_system))
