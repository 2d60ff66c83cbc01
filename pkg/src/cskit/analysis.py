"""Instance-level Pearson correlation between human and metric scores.

Correlations are computed for all instances and per error-type subset,
with a two-tailed significance test from the t-distribution. Undefined
cells (constant input, fewer than 3 instances) stay explicitly
undefined; 0 is a meaningful correlation and must not absorb them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ConstantInputError

SIGNIFICANCE_LEVEL = 0.05

#: Subset key for the unrestricted correlation row.
ALL_INSTANCES = "all"


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation coefficient."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [value - mean_x for value in x]
    dy = [value - mean_y for value in y]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ConstantInputError("correlation undefined for constant input")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


def p_value(rho: float, n: int) -> float:
    """Two-tailed p for the null of zero correlation.

    Uses t = rho * sqrt((n-2) / (1-rho^2)) against the t-distribution
    with n-2 degrees of freedom.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 for a p-value, got {n}")
    if abs(rho) >= 1.0:
        raise ValueError("p-value undefined at |rho| >= 1")
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    degrees = n - 2
    # Two-tailed tail mass via the regularized incomplete beta identity:
    # 2*sf(|t|) = I_{v/(v+t^2)}(v/2, 1/2).
    return _betainc_regularized(degrees / 2.0, 0.5, degrees / (degrees + t * t))


def _betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) by continued fraction."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the standard continued fraction.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


@dataclass(frozen=True)
class CorrelationCell:
    metric: str
    subset: str
    n: int
    rho: float | None = None
    p: float | None = None

    @property
    def defined(self) -> bool:
        return self.rho is not None

    @property
    def significant(self) -> bool:
        return self.p is not None and self.p <= SIGNIFICANCE_LEVEL


def correlate(
    human_scores: Mapping[tuple[str, str], float],
    metric_scores: Mapping[str, Mapping[tuple[str, str], float]],
    subsets: Mapping[str, set[tuple[str, str]]] | None = None,
) -> list[CorrelationCell]:
    """One correlation cell per (metric, subset), "all" subset included.

    Instance keys are the intersection of the human and metric score
    maps; cells with fewer than 3 instances or constant scores are
    reported undefined rather than forced to a number.
    """
    subsets = dict(subsets or {})
    cells = []
    for metric_name, scores in metric_scores.items():
        shared = sorted(set(human_scores) & set(scores))
        if not shared:
            raise ValueError(
                f"human and {metric_name!r} scores have disjoint instance keys"
            )
        rows: list[tuple[str, list[tuple[str, str]]]] = [(ALL_INSTANCES, shared)]
        for subset_name, members in subsets.items():
            rows.append((subset_name, [key for key in shared if key in members]))
        for subset_name, keys in rows:
            cells.append(
                _make_cell(metric_name, subset_name, keys, human_scores, scores)
            )
    return cells


def _make_cell(
    metric_name: str,
    subset_name: str,
    keys: Sequence[tuple[str, str]],
    human_scores: Mapping[tuple[str, str], float],
    scores: Mapping[tuple[str, str], float],
) -> CorrelationCell:
    n = len(keys)
    if n < 3:
        return CorrelationCell(metric=metric_name, subset=subset_name, n=n)
    x = [human_scores[key] for key in keys]
    y = [scores[key] for key in keys]
    try:
        rho = pearson(x, y)
    except ConstantInputError:
        return CorrelationCell(metric=metric_name, subset=subset_name, n=n)
    # |rho| = 1 corresponds to a degenerate, exactly linear sample.
    p = 0.0 if abs(rho) >= 1.0 else p_value(rho, n)
    return CorrelationCell(metric=metric_name, subset=subset_name, n=n, rho=rho, p=p)
