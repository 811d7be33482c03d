"""Cluster validity indices: Dunn (internal) and Rand/ARI/FMI (external)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContingencyMatrix:
    """Co-occurrence counts of two partitions of the same items."""

    counts: np.ndarray
    row_totals: np.ndarray
    col_totals: np.ndarray
    n: int


def _as_labels(labels) -> np.ndarray:
    arr = np.asarray(labels, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("labels must be a non-empty 1-d vector")
    if arr.min() < 0:
        raise ValueError("labels must be nonnegative")
    return arr


def contingency(a, b) -> ContingencyMatrix:
    a = _as_labels(a)
    b = _as_labels(b)
    if a.shape != b.shape:
        raise ValueError(f"partition length mismatch: {a.size} vs {b.size}")
    nr = int(a.max()) + 1
    nc = int(b.max()) + 1
    counts = np.zeros((nr, nc), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    return ContingencyMatrix(
        counts=counts,
        row_totals=counts.sum(axis=1),
        col_totals=counts.sum(axis=0),
        n=int(a.size),
    )


def _pair_counts(cm: ContingencyMatrix) -> tuple[float, float, float, float]:
    """(same-same pairs, same-in-a pairs, same-in-b pairs, total pairs)."""
    c = cm.counts.astype(float)
    sum_sq = float((c * (c - 1)).sum() / 2.0)
    pairs_a = float((cm.row_totals * (cm.row_totals - 1)).sum() / 2.0)
    pairs_b = float((cm.col_totals * (cm.col_totals - 1)).sum() / 2.0)
    total = cm.n * (cm.n - 1) / 2.0
    return sum_sq, pairs_a, pairs_b, total


def rand_index(a, b) -> float:
    """Fraction of item pairs on which the two partitions agree."""
    cm = contingency(a, b)
    if cm.n < 2:
        raise ValueError("rand_index needs at least 2 items")
    ss, pa, pb, total = _pair_counts(cm)
    agree = total + 2.0 * ss - pa - pb
    return agree / total


def adjusted_rand(a, b) -> float:
    """Hubert-Arabie chance-corrected Rand index."""
    cm = contingency(a, b)
    if cm.n < 2:
        raise ValueError("adjusted_rand needs at least 2 items")
    ss, pa, pb, total = _pair_counts(cm)
    expected = pa * pb / total
    max_index = (pa + pb) / 2.0
    denom = max_index - expected
    if denom == 0:
        # Both partitions all singletons or both one cluster: the permutation
        # model is degenerate.
        identical = rand_index(a, b) == 1.0
        warnings.warn("adjusted_rand: degenerate pair-count denominator", RuntimeWarning)
        return 1.0 if identical else 0.0
    return (ss - expected) / denom


def fowlkes_mallows(a, b) -> float:
    """Geometric mean of pairwise precision and recall over co-clustered pairs."""
    cm = contingency(a, b)
    if cm.n < 2:
        raise ValueError("fowlkes_mallows needs at least 2 items")
    tp, pa, pb, _ = _pair_counts(cm)
    if pa == 0 or pb == 0:
        warnings.warn("fowlkes_mallows: no co-clustered pairs in one partition", RuntimeWarning)
        return 0.0
    return float(np.sqrt((tp / pa) * (tp / pb)))


def dunn_index(points, labels) -> float:
    """Minimum single-linkage inter-cluster distance over maximum cluster diameter.

    0 means touching clusters (no separation). If every cluster is a set of
    duplicated points the diameter is 0 and +inf is returned with a warning;
    callers aggregating weights replace the sentinel.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    lab = _as_labels(labels)
    if lab.size != pts.shape[0]:
        raise ValueError("labels must match the number of points")
    used = np.unique(lab)
    if used.size < 2:
        raise ValueError("dunn_index needs at least 2 non-empty clusters")

    sq = (pts * pts).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(d2, 0.0, out=d2)
    same = lab[:, None] == lab[None, :]
    np.fill_diagonal(same, True)

    inter2 = d2[~same]
    intra2 = d2[same]
    min_inter2 = float(inter2.min())
    max_intra2 = float(intra2.max())
    if min_inter2 == 0.0:
        return 0.0
    if max_intra2 == 0.0:
        warnings.warn("dunn_index: all clusters have zero diameter", RuntimeWarning)
        return float("inf")
    return float(np.sqrt(min_inter2 / max_intra2))
