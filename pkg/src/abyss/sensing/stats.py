"""Kruskal-Wallis rank test with midrank ties and the standard tie correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KruskalResult:
    H: float
    eta_squared: float


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of their rank span."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def kruskal_wallis(groups: list[list[float]] | list[np.ndarray]) -> KruskalResult:
    """H statistic plus eta-squared effect size (H - g + 1) / (n - g).

    All-equal data (every rank tied) yields H = 0 by convention rather than
    the 0/0 the tie-correction divisor would produce.
    """
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if any(len(a) == 0 for a in arrays):
        raise ValueError("groups must be non-empty")
    pooled = np.concatenate(arrays)
    n = len(pooled)
    g = len(arrays)
    ranks = _midranks(pooled)

    grand_mean = (n + 1) / 2.0
    h = 0.0
    start = 0
    for a in arrays:
        r = ranks[start : start + len(a)]
        start += len(a)
        h += len(a) * (r.mean() - grand_mean) ** 2
    h *= 12.0 / (n * (n + 1))

    # tie correction: divide by 1 - sum(t^3 - t) / (n^3 - n)
    _, counts = np.unique(pooled, return_counts=True)
    tie_sum = float(((counts.astype(float) ** 3) - counts).sum())
    divisor = 1.0 - tie_sum / (n**3 - n)
    if divisor <= 0.0:
        return KruskalResult(0.0, 0.0)
    h /= divisor

    if n > g:
        eta = (h - g + 1) / (n - g)
    else:
        eta = 0.0
    return KruskalResult(float(h), float(min(max(eta, 0.0), 1.0)))
