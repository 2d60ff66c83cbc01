"""Independent brute-force reference implementations.

Each oracle re-derives the documented behavior with plain loops and no
code shared with the package, so a bug in the implementation cannot
hide in its own test.
"""

from __future__ import annotations

import math


def naive_tokenize(text: str) -> list[str]:
    """Separate punctuation from words, split on whitespace, keep case."""
    tokens: list[str] = []
    word = ""
    for ch in text:
        if ch.isalnum() or ch == "_":
            word += ch
        else:
            if word:
                tokens.append(word)
                word = ""
            if not ch.isspace():
                tokens.append(ch)
    if word:
        tokens.append(word)
    return tokens


def _count(sequence: list, item) -> int:
    return sum(1 for element in sequence if element == item)


def _clipped_matches(cand_ngrams: list, ref_ngrams: list) -> int:
    matched = 0
    for ngram in set(map(tuple, cand_ngrams)):
        matched += min(
            _count([tuple(g) for g in cand_ngrams], ngram),
            _count([tuple(g) for g in ref_ngrams], ngram),
        )
    return matched


def _word_ngrams(tokens: list[str], order: int) -> list[tuple]:
    return [tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)]


def naive_sentence_bleu(candidate: str, reference: str) -> float:
    cand = naive_tokenize(candidate)
    ref = naive_tokenize(reference)
    if not cand:
        return 0.0
    logs = []
    for order in (1, 2, 3, 4):
        cand_ngrams = _word_ngrams(cand, order)
        if not cand_ngrams:
            continue
        matched = _clipped_matches(cand_ngrams, _word_ngrams(ref, order))
        total = len(cand_ngrams)
        if matched == 0:
            if order == 1:
                return 0.0
            logs.append(math.log(1.0 / (total + 1)))
        else:
            logs.append(math.log(matched / total))
    if not logs:
        return 0.0
    geometric_mean = math.exp(sum(logs) / len(logs))
    brevity = 1.0 if len(cand) >= len(ref) else math.exp(1.0 - len(ref) / len(cand))
    return 100.0 * brevity * geometric_mean


def naive_corpus_bleu(candidates: list[str], references: list[str]) -> float:
    matched = {1: 0, 2: 0, 3: 0, 4: 0}
    totals = {1: 0, 2: 0, 3: 0, 4: 0}
    cand_len = 0
    ref_len = 0
    for candidate, reference in zip(candidates, references):
        cand = naive_tokenize(candidate)
        ref = naive_tokenize(reference)
        cand_len += len(cand)
        ref_len += len(ref)
        for order in (1, 2, 3, 4):
            cand_ngrams = _word_ngrams(cand, order)
            matched[order] += _clipped_matches(cand_ngrams, _word_ngrams(ref, order))
            totals[order] += len(cand_ngrams)
    if cand_len == 0:
        return 0.0
    logs = []
    for order in (1, 2, 3, 4):
        if totals[order] == 0:
            continue
        if matched[order] == 0:
            return 0.0
        logs.append(math.log(matched[order] / totals[order]))
    if not logs:
        return 0.0
    geometric_mean = math.exp(sum(logs) / len(logs))
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * brevity * geometric_mean


def naive_chrf(candidate: str, reference: str, beta: float = 2.0) -> float:
    cand = "".join(ch for ch in candidate if not ch.isspace())
    ref = "".join(ch for ch in reference if not ch.isspace())
    if not cand:
        return 0.0
    precisions = []
    recalls = []
    for order in range(1, 7):
        ref_ngrams = [ref[i : i + order] for i in range(len(ref) - order + 1)]
        if not ref_ngrams:
            continue
        cand_ngrams = [cand[i : i + order] for i in range(len(cand) - order + 1)]
        matched = 0
        for gram in set(cand_ngrams):
            matched += min(_count(cand_ngrams, gram), _count(ref_ngrams, gram))
        precisions.append(matched / len(cand_ngrams) if cand_ngrams else 0.0)
        recalls.append(matched / len(ref_ngrams))
    if not precisions:
        return 0.0
    precision = sum(precisions) / len(precisions)
    recall = sum(recalls) / len(recalls)
    if precision + recall == 0.0:
        return 0.0
    return (
        100.0
        * (1 + beta * beta)
        * precision
        * recall
        / (beta * beta * precision + recall)
    )


def bag_overlap_f1(candidate: str, reference: str) -> float:
    """Type-level overlap F1; what greedy one-hot matching must reduce to."""
    cand = [t.lower() for t in naive_tokenize(candidate)]
    ref = [t.lower() for t in naive_tokenize(reference)]
    ref_types = set(ref)
    cand_types = set(cand)
    precision = sum(1 for t in cand if t in ref_types) / len(cand)
    recall = sum(1 for t in ref if t in cand_types) / len(ref)
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def naive_pearson(x: list[float], y: list[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))
    return num / den


def t_density(x: float, df: int) -> float:
    log_norm = (
        math.lgamma((df + 1) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - ((df + 1) / 2.0) * math.log(1.0 + x * x / df))


def p_value_quadrature(t: float, df: int, intervals: int = 40_000) -> float:
    """Two-tailed p via Simpson integration of the t density over [0, |t|]."""
    t = abs(t)
    if t == 0.0:
        return 1.0
    h = t / intervals
    total = t_density(0.0, df) + t_density(t, df)
    for i in range(1, intervals):
        total += (4 if i % 2 else 2) * t_density(i * h, df)
    central_mass = total * h / 3.0
    return max(0.0, min(1.0, 2.0 * (0.5 - central_mass)))


def exhaustive_truncate(raw: str, source: str, punctuation: str = ".!?,;:…") -> str:
    """Enumerate every punctuation-terminated prefix plus the full text."""
    candidates = [raw[:i] for i in range(1, len(raw) + 1) if raw[i - 1] in punctuation]
    candidates.append(raw)
    best = None
    for candidate in candidates:
        deviation = abs(len(candidate) - len(source))
        if (
            best is None
            or deviation < best[0]
            or (deviation == best[0] and len(candidate) < len(best[1]))
        ):
            best = (deviation, candidate)
    assert best is not None
    return best[1].rstrip()


def count_alpha_words(tagged_tokens: list[tuple[str, str]], tag: str) -> int:
    """Brute-force counter behind the code-switching filter."""
    count = 0
    for surface, token_tag in tagged_tokens:
        if token_tag != tag:
            continue
        if any(ch.isalpha() for ch in surface):
            count += 1
    return count
