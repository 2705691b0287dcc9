"""K-Means usage clustering with silhouette-based K selection.

Occurrence vectors of a word from two time slices are pooled and clustered
jointly so the two per-slice distributions share a support. A dispersion
gate assigns K = 1 to words whose usage barely varies (monosemy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .embeddings import UsageMatrix
from .errors import DimMismatch, SingleCluster, TooFewRows

MAX_LLOYD_ITERATIONS = 300
DEFAULT_RESTARTS = 10
DEFAULT_K_MIN = 2
DEFAULT_K_MAX = 10
DEFAULT_DISPERSION_THRESHOLD = 0.05


@dataclass(frozen=True)
class ClusterParams:
    k_min: int = DEFAULT_K_MIN
    k_max: int = DEFAULT_K_MAX
    restarts: int = DEFAULT_RESTARTS
    dispersion_threshold: float = DEFAULT_DISPERSION_THRESHOLD
    seed: int = 0


@dataclass
class ClusterResult:
    word: str
    K: int
    assignments: np.ndarray  # (N,) ints in [0, K)
    centroids: np.ndarray  # (K, dim)
    distortion: float
    silhouette: float  # nan when K == 1
    # per-restart, per-iteration distortion history (diagnostic)
    iteration_distortions: tuple[tuple[float, ...], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class UsageDistribution:
    word: str
    time_label: str
    probs: np.ndarray


def _pairwise_sq(rows: np.ndarray, centroids: np.ndarray, row_sq: np.ndarray) -> np.ndarray:
    d2 = row_sq[:, None] + np.sum(centroids**2, axis=1)[None, :] - 2.0 * rows @ centroids.T
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeanspp_init(rows, K, rng, row_sq):
    n = rows.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _pairwise_sq(rows, rows[chosen[-1]][None, :], row_sq)[:, 0]
    for _ in range(1, K):
        total = closest.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        d_new = _pairwise_sq(rows, rows[idx][None, :], row_sq)[:, 0]
        np.minimum(closest, d_new, out=closest)
    return rows[chosen].copy()


def _lloyd(rows, K, rng, row_sq):
    """One seeded k-means++ / Lloyd run; returns assignment fixpoint or caps out."""
    n, dim = rows.shape
    centroids = _kmeanspp_init(rows, K, rng, row_sq)
    prev = None
    history: list[float] = []
    assignments = np.zeros(n, dtype=np.intp)

    for _ in range(MAX_LLOYD_ITERATIONS):
        d2 = _pairwise_sq(rows, centroids, row_sq)
        assignments = np.argmin(d2, axis=1)
        distortion = float(d2[np.arange(n), assignments].sum())
        if history:
            assert distortion <= history[-1] + 1e-9 * max(1.0, history[-1]), (
                "Lloyd distortion increased"
            )
        history.append(distortion)
        if prev is not None and np.array_equal(assignments, prev):
            break
        prev = assignments

        counts = np.bincount(assignments, minlength=K)
        new_centroids = centroids.copy()
        for k in range(K):
            if counts[k]:
                new_centroids[k] = rows[assignments == k].mean(axis=0)
        if np.any(counts == 0):
            # Relocate empty centroids onto the points currently worst
            # served; does not disturb the recorded distortion sequence.
            own = d2[np.arange(n), assignments]
            order = np.argsort(-own, kind="stable")
            claimed: set[int] = set()
            pick = 0
            for k in np.flatnonzero(counts == 0):
                while pick < n and int(order[pick]) in claimed:
                    pick += 1
                if pick >= n:
                    break
                idx = int(order[pick])
                claimed.add(idx)
                new_centroids[k] = rows[idx]
        centroids = new_centroids

    return assignments, centroids, history


def kmeans(rows: np.ndarray, K: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> ClusterResult:
    """Best-of-restarts k-means++ / Lloyd clustering, deterministic given seed.

    Runs `restarts` independent seeded runs (seed, seed+1, ...) and keeps the
    one with minimal distortion.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("rows must be a 2-D matrix")
    if K < 1:
        raise ValueError("K must be >= 1")
    if rows.shape[0] < K:
        raise TooFewRows(f"{rows.shape[0]} rows for K={K}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    row_sq = np.sum(rows**2, axis=1)
    best = None
    histories: list[tuple[float, ...]] = []
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        assignments, centroids, history = _lloyd(rows, K, rng, row_sq)
        histories.append(tuple(history))
        if best is None or history[-1] < best[2]:
            best = (assignments, centroids, history[-1])

    assignments, centroids, distortion = best
    if K >= 2 and len(np.unique(assignments)) >= 2:
        sil = silhouette(rows, assignments)
    else:
        sil = math.nan
    return ClusterResult(
        word="",
        K=K,
        assignments=assignments,
        centroids=centroids,
        distortion=distortion,
        silhouette=sil,
        iteration_distortions=tuple(histories),
    )


def silhouette(rows: np.ndarray, assignments: np.ndarray) -> float:
    """Mean silhouette over points; singleton-cluster points contribute 0."""
    rows = np.asarray(rows, dtype=np.float64)
    assignments = np.asarray(assignments)
    labels, inverse = np.unique(assignments, return_inverse=True)
    k = len(labels)
    if k < 2:
        raise SingleCluster("silhouette needs at least two clusters")

    n = rows.shape[0]
    row_sq = np.sum(rows**2, axis=1)
    d2 = _pairwise_sq(rows, rows, row_sq)
    dist = np.sqrt(d2)

    counts = np.bincount(inverse, minlength=k)
    sums = np.zeros((n, k))
    for j in range(k):
        sums[:, j] = dist[:, inverse == j].sum(axis=1)

    own = counts[inverse]
    scores = np.zeros(n)
    multi = own > 1
    a = np.zeros(n)
    a[multi] = sums[np.arange(n), inverse][multi] / (own[multi] - 1)

    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), inverse] = np.inf
    b = mean_other.min(axis=1)

    denom = np.maximum(a, b)
    ok = multi & (denom > 0)
    scores[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(scores.mean())


def select_k(
    rows: np.ndarray,
    k_min: int = DEFAULT_K_MIN,
    k_max: int = DEFAULT_K_MAX,
    dispersion_threshold: float = DEFAULT_DISPERSION_THRESHOLD,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> ClusterResult:
    """Pick K by silhouette after the monosemy dispersion gate.

    If the mean per-point dispersion around the global centroid falls below
    the threshold the word is treated as single-usage (K = 1); otherwise K
    in [k_min, min(k_max, N)] maximizing the silhouette wins, ties toward
    smaller K.
    """
    rows = np.asarray(rows, dtype=np.float64)
    n = rows.shape[0]
    if n < 2:
        raise TooFewRows("select_k needs at least 2 rows")

    base = kmeans(rows, 1, restarts=1, seed=seed)
    if base.distortion / n < dispersion_threshold:
        return base

    best: ClusterResult | None = None
    for K in range(k_min, min(k_max, n) + 1):
        result = kmeans(rows, K, restarts=restarts, seed=seed)
        score = result.silhouette
        if math.isnan(score):
            continue
        if best is None or score > best.silhouette:
            best = result
    return best if best is not None else base


def usage_distributions(
    word: str,
    matrix_t: UsageMatrix,
    matrix_tp: UsageMatrix,
    params: ClusterParams = ClusterParams(),
) -> tuple[UsageDistribution, UsageDistribution, ClusterResult]:
    """Joint clustering of both slices, then per-slice frequencies over clusters."""
    if matrix_t.dim != matrix_tp.dim:
        raise DimMismatch(
            f"word {word!r}: dims {matrix_t.dim} vs {matrix_tp.dim}"
        )
    pooled = np.vstack([matrix_t.rows, matrix_tp.rows])
    result = select_k(
        pooled,
        k_min=params.k_min,
        k_max=params.k_max,
        dispersion_threshold=params.dispersion_threshold,
        restarts=params.restarts,
        seed=params.seed,
    )
    result = replace(result, word=word)

    n_t = matrix_t.n
    counts_t = np.bincount(result.assignments[:n_t], minlength=result.K)
    counts_tp = np.bincount(result.assignments[n_t:], minlength=result.K)
    ud_t = UsageDistribution(word=word, time_label=matrix_t.time_label, probs=counts_t / counts_t.sum())
    ud_tp = UsageDistribution(word=word, time_label=matrix_tp.time_label, probs=counts_tp / counts_tp.sum())
    return ud_t, ud_tp, result
