"""Seeded generators for the four synthetic benchmark datasets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class MixtureSpec:
    """Gaussian-mixture relevant features plus range-matched uniform noise groups.

    ``block_sizes``/``block_scales`` describe the block-diagonal covariance of
    the relevant features; block i's correlation is ``loadings`` outer-product
    (identity if loadings is None). ``noise_groups[i]`` noise columns draw
    uniformly over the pooled observed range of block i.
    """

    cluster_sizes: tuple[int, ...]
    block_sizes: tuple[int, ...]
    block_scales: tuple[float, ...]
    noise_groups: tuple[int, ...]
    loadings: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.block_sizes) != len(self.block_scales):
            raise ValueError("one scale per covariance block")
        if len(self.noise_groups) != len(self.block_sizes):
            raise ValueError("one noise group per covariance block")
        if any(s < 1 for s in self.cluster_sizes):
            raise ValueError("cluster sizes must be >= 1")

    @property
    def K(self) -> int:
        return len(self.cluster_sizes)

    @property
    def d_f(self) -> int:
        return sum(self.block_sizes)

    @property
    def d_n(self) -> int:
        return sum(self.noise_groups)


OVERLAP_SPEC = MixtureSpec(
    cluster_sizes=(30, 30, 30, 30),
    block_sizes=(5, 5, 5),
    block_scales=(0.2, 0.35, 0.5),
    noise_groups=(2, 2, 2),
)
PROPORTION_SPEC = MixtureSpec(
    cluster_sizes=(15, 20, 40, 30, 15),
    block_sizes=(4, 4),
    block_scales=(0.25, 0.5),
    noise_groups=(4, 4),
)
CORRELATION_SPEC = MixtureSpec(
    cluster_sizes=(30, 30, 30, 30),
    block_sizes=(4, 4, 4),
    block_scales=(0.25, 0.35, 0.45),
    noise_groups=(2, 2, 2),
    loadings=(1.0, 0.75, 0.25, 0.1),
)


def _feature_names(p: int) -> tuple[str, ...]:
    return tuple(f"X{j + 1}" for j in range(p))


def block_correlation(loadings: tuple[float, ...] | None, q: int) -> np.ndarray:
    if loadings is None:
        return np.eye(q)
    lam = np.asarray(loadings, dtype=float)
    if lam.size != q:
        raise ValueError("loadings length must match block size")
    R = np.outer(lam, lam)
    np.fill_diagonal(R, 1.0)
    return R


def gen_mixture(spec: MixtureSpec, rng) -> tuple[Dataset, np.ndarray]:
    """Sample a MixtureSpec: cluster k has mean (k+1) on every relevant feature."""
    gen = rng.generator() if hasattr(rng, "generator") else rng
    n = sum(spec.cluster_sizes)
    relevant = np.empty((n, spec.d_f))
    truth = np.empty(n, dtype=np.int64)

    chols = [
        scale * np.linalg.cholesky(block_correlation(spec.loadings, q))
        for q, scale in zip(spec.block_sizes, spec.block_scales)
    ]
    row = 0
    for k, size in enumerate(spec.cluster_sizes):
        col = 0
        for q, chol in zip(spec.block_sizes, chols):
            z = gen.standard_normal((size, q))
            relevant[row:row + size, col:col + q] = (k + 1.0) + z @ chol.T
            col += q
        truth[row:row + size] = k
        row += size

    noise_cols = []
    col = 0
    for q, group in zip(spec.block_sizes, spec.noise_groups):
        block = relevant[:, col:col + q]
        lo, hi = float(block.min()), float(block.max())
        for _ in range(group):
            noise_cols.append(gen.uniform(lo, hi, size=n))
        col += q
    values = np.column_stack([relevant] + noise_cols)
    dataset = Dataset(values=values, feature_names=_feature_names(values.shape[1]),
                      truth_labels=truth)
    return dataset, truth


def gen_illustrative(rng) -> tuple[Dataset, np.ndarray]:
    """3 clusters of 99 points, 6 features.

    X1/X2 are the coordinates of a cluster-dependent bivariate Gaussian, X3 a
    well-separated univariate Gaussian, and X4-X6 are uniform noise matched to
    the observed ranges of X1/X2 (pooled, X1, and X2 respectively).
    """
    gen = rng.generator() if hasattr(rng, "generator") else rng
    per_cluster = 99
    means_xy = [(0.0, 0.0), (3.0, 3.0), (3.0, 6.0)]
    sd_x1, sd_x2 = np.sqrt(0.5), np.sqrt(0.1)
    means_x3 = [1.0, 3.0, 5.0]
    sd_x3 = 0.3

    x1_parts, x2_parts, x3_parts = [], [], []
    for c in range(3):
        x1_parts.append(gen.normal(means_xy[c][0], sd_x1, per_cluster))
        x2_parts.append(gen.normal(means_xy[c][1], sd_x2, per_cluster))
        x3_parts.append(gen.normal(means_x3[c], sd_x3, per_cluster))
    x1 = np.concatenate(x1_parts)
    x2 = np.concatenate(x2_parts)
    x3 = np.concatenate(x3_parts)
    n = 3 * per_cluster

    pooled_lo = min(x1.min(), x2.min())
    pooled_hi = max(x1.max(), x2.max())
    x4 = gen.uniform(pooled_lo, pooled_hi, n)
    x5 = gen.uniform(x1.min(), x1.max(), n)
    x6 = gen.uniform(x2.min(), x2.max(), n)

    values = np.column_stack([x1, x2, x3, x4, x5, x6])
    truth = np.repeat(np.arange(3, dtype=np.int64), per_cluster)
    dataset = Dataset(values=values, feature_names=_feature_names(6), truth_labels=truth)
    return dataset, truth


def gen_overlap(rng) -> tuple[Dataset, np.ndarray]:
    return gen_mixture(OVERLAP_SPEC, rng)


def gen_proportion(rng) -> tuple[Dataset, np.ndarray]:
    return gen_mixture(PROPORTION_SPEC, rng)


def gen_correlation(rng) -> tuple[Dataset, np.ndarray]:
    return gen_mixture(CORRELATION_SPEC, rng)


GENERATORS = {
    "illustrative": gen_illustrative,
    "overlap": gen_overlap,
    "proportion": gen_proportion,
    "correlation": gen_correlation,
}
