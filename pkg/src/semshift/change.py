"""Semantic-change metrics over usage distributions and usage matrices.

All entropies use base-2 logs, which bounds the Jensen-Shannon divergence
to [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .embeddings import UsageMatrix
from .errors import DimMismatch, EmptyMatrix, LengthMismatch, NotADistribution

logger = logging.getLogger(__name__)

DISTRIBUTION_SUM_TOL = 1e-9
DEFAULT_K = 500
DEFAULT_BIN_WIDTH = 0.05
METRICS = ("jsd", "ed", "apd")


@dataclass(frozen=True)
class ChangeScore:
    word: str
    jsd: float
    ed: float
    apd: float
    n_t: int
    n_tp: int


@dataclass(frozen=True)
class MaskCandidateList:
    words: tuple[str, ...]  # descending by the selected metric
    metric: str
    k: int


@dataclass(frozen=True)
class HistogramBin:
    lo: float
    hi: float
    count: int
    pct: float


def _check_distribution(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise NotADistribution("expected a non-empty 1-D probability vector")
    if np.any(p < 0):
        raise NotADistribution("negative component")
    if abs(float(p.sum()) - 1.0) > DISTRIBUTION_SUM_TOL:
        raise NotADistribution(f"components sum to {float(p.sum())}")
    return p


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 * log 0 = 0."""
    p = _check_distribution(p)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def jsd(p, q) -> float:
    """Jensen-Shannon divergence with base-2 logs; symmetric, in [0, 1]."""
    p = _check_distribution(p)
    q = _check_distribution(q)
    if p.size != q.size:
        raise LengthMismatch(f"lengths {p.size} vs {q.size}")
    m = (p + q) / 2.0
    value = entropy(m) - 0.5 * (entropy(p) + entropy(q))
    return min(1.0, max(0.0, value))


def entropy_difference(p, q) -> float:
    """Absolute difference of the two entropies, in bits."""
    p = _check_distribution(p)
    q = _check_distribution(q)
    if p.size != q.size:
        raise LengthMismatch(f"lengths {p.size} vs {q.size}")
    return abs(entropy(p) - entropy(q))


def apd(m_t: UsageMatrix, m_tp: UsageMatrix) -> float:
    """Mean cosine distance over all cross-period occurrence pairs.

    Assumes unit-norm rows, so cosine distance is 1 - dot.
    """
    if m_t.n == 0 or m_tp.n == 0:
        raise EmptyMatrix("both matrices need at least one row")
    if m_t.dim != m_tp.dim:
        raise DimMismatch(f"dims {m_t.dim} vs {m_tp.dim}")
    sims = m_t.rows @ m_tp.rows.T
    return float((1.0 - sims).mean())


def rank_and_select(scores: list[ChangeScore], metric: str = "jsd", k: int = DEFAULT_K) -> MaskCandidateList:
    """Top-k words by the chosen metric, descending, lexicographic tie-break."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > len(scores):
        logger.warning("k=%d exceeds %d available words; returning all", k, len(scores))
    ordered = sorted(scores, key=lambda s: (-getattr(s, metric), s.word))
    return MaskCandidateList(words=tuple(s.word for s in ordered[:k]), metric=metric, k=k)


def score_distribution_report(
    scores: list[ChangeScore], bin_width: float = DEFAULT_BIN_WIDTH, metric: str = "jsd"
) -> list[HistogramBin]:
    """Histogram of scores in half-open bins [0, w), [w, 2w), ...

    Mirrors the usual distribution table for change scores (counts plus
    percentages). Covers every bin up to the maximum observed score.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    values = [getattr(s, metric) for s in scores]
    if not values:
        return [HistogramBin(0.0, bin_width, 0, 0.0)]
    n_bins = max(1, int(max(values) // bin_width) + 1)
    counts = [0] * n_bins
    for v in values:
        counts[min(int(v // bin_width), n_bins - 1)] += 1
    total = len(values)
    return [
        HistogramBin(lo=i * bin_width, hi=(i + 1) * bin_width, count=c, pct=100.0 * c / total)
        for i, c in enumerate(counts)
    ]
