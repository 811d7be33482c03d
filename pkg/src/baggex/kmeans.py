"""Weighted Lloyd K-means and nearest-centroid extension to the full dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateSampleError(ValueError):
    """Raised when a sample cannot support K clusters."""


@dataclass(frozen=True)
class KMeansConfig:
    K: int
    max_iter: int = 100
    tol: float = 1e-8
    restarts: int = 10

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class KMeansModel:
    centroids: np.ndarray
    replica_labels: np.ndarray
    wss: float
    iterations: int
    converged: bool


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    p2 = (points * points).sum(axis=1)[:, None]
    c2 = (centroids * centroids).sum(axis=1)[None, :]
    d2 = p2 + c2 - 2.0 * (points @ centroids.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _forgy_init(points: np.ndarray, weights: np.ndarray, K: int,
                rng: np.random.Generator) -> np.ndarray:
    """K distinct points drawn weight-proportionally without replacement."""
    pos = weights > 0
    uniq, inverse = np.unique(points[pos], axis=0, return_inverse=True)
    if uniq.shape[0] < K:
        raise DegenerateSampleError(
            f"only {uniq.shape[0]} distinct weighted points for K={K}"
        )
    mass = np.zeros(uniq.shape[0])
    np.add.at(mass, inverse, weights[pos])
    pick = rng.choice(uniq.shape[0], size=K, replace=False, p=mass / mass.sum())
    return uniq[pick].copy()


def _lloyd(points: np.ndarray, weights: np.ndarray, cfg: KMeansConfig,
           rng: np.random.Generator) -> KMeansModel:
    K = cfg.K
    centroids = _forgy_init(points, weights, K, rng)
    labels = _squared_distances(points, centroids).argmin(axis=1)
    prev_wss = None
    wss = float("inf")
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        # Weighted mean update; clusters that lost all weight are reseated at
        # the point farthest (weighted) from its current centroid, keeping K fixed.
        for k in range(K):
            mask = labels == k
            wk = weights[mask].sum()
            if wk > 0:
                centroids[k] = (points[mask] * weights[mask, None]).sum(axis=0) / wk
        d2_assigned = ((points - centroids[labels]) ** 2).sum(axis=1) * weights
        for k in range(K):
            if weights[labels == k].sum() == 0:
                far = int(d2_assigned.argmax())
                centroids[k] = points[far]
                d2_assigned[far] = 0.0

        d2 = _squared_distances(points, centroids)
        labels = d2.argmin(axis=1)
        wss = float((d2[np.arange(points.shape[0]), labels] * weights).sum())
        if prev_wss is not None and prev_wss - wss <= cfg.tol * max(prev_wss, _WSS_FLOOR):
            converged = True
            break
        prev_wss = wss
    return KMeansModel(
        centroids=centroids,
        replica_labels=labels.astype(np.int64),
        wss=wss,
        iterations=iterations,
        converged=converged,
    )


_WSS_FLOOR = 1e-300


def kmeans_fit(values, weights, cfg: KMeansConfig, rng) -> KMeansModel:
    """Run weighted Lloyd iterations; keep the best of ``cfg.restarts`` inits.

    ``rng`` may be an RngStream or a numpy Generator. Weights must be
    nonnegative with positive total; scaling all weights by a constant leaves
    labels and centroids unchanged.
    """
    points = np.asarray(values, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    w = np.asarray(weights, dtype=float)
    if w.shape != (points.shape[0],):
        raise ValueError("weights must have one entry per row")
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    if w.sum() <= 0:
        raise DegenerateSampleError("total weight must be positive")
    gen = rng.generator() if hasattr(rng, "generator") else rng

    best: KMeansModel | None = None
    for _ in range(cfg.restarts):
        model = _lloyd(points, w, cfg, gen)
        if best is None or model.wss < best.wss:
            best = model
    assert best is not None
    return best


def assign_nearest(values, subspace, centroids) -> np.ndarray:
    """Label every row by its Euclidean-nearest centroid in subspace coordinates.

    Ties break toward the lowest centroid index.
    """
    cols = np.asarray(subspace, dtype=np.int64)
    if cols.size == 0:
        raise ValueError("subspace must not be empty")
    pts = np.asarray(values, dtype=float)[:, cols]
    cents = np.asarray(centroids, dtype=float)
    if not np.isfinite(cents).all():
        raise ValueError("centroids must be finite")
    return _squared_distances(pts, cents).argmin(axis=1).astype(np.int64)
