"""Entropy, KDE-based mutual information, and variation of information.

All quantities are in bits. Continuous entropies use a Gaussian-kernel
density with Silverman bandwidth, evaluated by resubstitution; the self term
bounds the surprisal of isolated points, which keeps per-cluster estimates
stable under imperfect labelings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .validation import contingency

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class KdeModel:
    sample: np.ndarray
    bandwidth: float


@dataclass(frozen=True)
class MiVector:
    """Per-feature MI of one replica, raw and max-normalized to [0, 1]."""

    raw_bits: np.ndarray
    normalized: np.ndarray
    all_zero: bool


def discrete_entropy(labels) -> float:
    """Shannon entropy of the empirical label distribution."""
    lab = np.asarray(labels)
    if lab.size == 0:
        raise ValueError("labels must be non-empty")
    _, counts = np.unique(lab, return_counts=True)
    p = counts / lab.size
    return float(-(p * np.log2(p)).sum())


def silverman_bandwidth(values) -> float:
    """Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5).

    Falls back to the sd alone when the IQR is 0; a constant sample has no
    usable scale and raises.
    """
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 values")
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise ValueError("constant values have no bandwidth")
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * scale * x.size ** (-0.2)


def fit_kde(values) -> KdeModel:
    x = np.asarray(values, dtype=float)
    return KdeModel(sample=x, bandwidth=silverman_bandwidth(x))


def kde_entropy(values, _block: int = 2048) -> float:
    """Differential entropy estimate -mean(log2 f_hat(x_i)) under the sample's KDE."""
    x = np.asarray(values, dtype=float)
    h = silverman_bandwidth(x)
    n = x.size
    norm = n * h * _SQRT_2PI
    inv = -0.5 / (h * h)
    total = 0.0
    for start in range(0, n, _block):
        chunk = x[start:start + _block]
        kernel = np.exp(inv * (chunk[:, None] - x[None, :]) ** 2)
        dens = kernel.sum(axis=1) / norm
        total += float(np.log2(np.clip(dens, _TINY, None)).sum())
    return -total / n


CONDITIONAL_BANDWIDTH_FACTOR = 1.0


def feature_label_mi(values, labels,
                     bandwidth_factor: float | None = None) -> float:
    """Estimated I(X; labels) = H(X) - sum_c p(c) H(X | c), clamped at 0.

    Every entropy is taken against the kernel mixture of the per-cluster
    densities: the marginal is sum_c p(c) f_c, so the estimate is a proper
    discrete MI of the smoothed joint, bounded by the label entropy. Clusters
    too small or internally constant carry no density estimate; they are
    skipped and the remaining cluster weights renormalized. A globally
    constant feature carries no information and scores 0.
    """
    x = np.asarray(values, dtype=float)
    lab = np.asarray(labels, dtype=np.int64)
    if x.shape != lab.shape:
        raise ValueError("values and labels must have equal length")
    if x.std(ddof=1) == 0.0:
        warnings.warn("feature_label_mi: constant feature scores 0", RuntimeWarning)
        return 0.0
    factor = CONDITIONAL_BANDWIDTH_FACTOR if bandwidth_factor is None else bandwidth_factor

    clusters = []
    for c in np.unique(lab):
        xs = x[lab == c]
        if xs.size < 2 or xs.std(ddof=1) == 0.0:
            continue
        clusters.append((xs, factor * silverman_bandwidth(xs)))
    if not clusters:
        return 0.0
    n_used = sum(xs.size for xs, _ in clusters)

    total = 0.0
    for xs, h in clusters:
        # density of every used point under this cluster's KDE (self included)
        own = np.exp(-0.5 * ((xs[:, None] - xs[None, :]) / h) ** 2).sum(axis=1)
        own_dens = own / (xs.size * h * _SQRT_2PI)
        mix_dens = np.zeros(xs.size)
        for other, oh in clusters:
            k = np.exp(-0.5 * ((xs[:, None] - other[None, :]) / oh) ** 2).sum(axis=1)
            mix_dens += k / (n_used * oh * _SQRT_2PI)
        ratio = np.clip(own_dens, _TINY, None) / np.clip(mix_dens, _TINY, None)
        total += float(np.log2(ratio).sum())
    return max(total / n_used, 0.0)


def normalize_mi(raw) -> MiVector:
    """Scale a replica's per-feature MI so the largest value is 1."""
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("raw MI must be a non-empty vector")
    if (arr < 0).any():
        raise ValueError("raw MI values must be nonnegative")
    top = arr.max()
    if top == 0.0:
        warnings.warn("normalize_mi: all-zero MI vector", RuntimeWarning)
        return MiVector(raw_bits=arr, normalized=np.zeros_like(arr), all_zero=True)
    return MiVector(raw_bits=arr, normalized=arr / top, all_zero=False)


def _entropy_from_probs(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def vi_from_counts(counts: np.ndarray, n: int) -> float:
    p = counts / n
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    ha = _entropy_from_probs(pa)
    hb = _entropy_from_probs(pb)
    nz = p > 0
    mi = float((p[nz] * np.log2(p[nz] / np.outer(pa, pb)[nz])).sum())
    return max(ha + hb - 2.0 * mi, 0.0)


def variation_of_information(a, b) -> float:
    """VI(a, b) = H(a) + H(b) - 2 I(a, b); a metric on partitions."""
    cm = contingency(a, b)
    return vi_from_counts(cm.counts, cm.n)
