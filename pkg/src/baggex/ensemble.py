"""Ensemble orchestration: replicas, feature-importance aggregation, consensus.

Randomness is addressed by seed-sequence streams derived from the config's
master seed: replica b draws from stream (0, b) in the fixed order resample,
subspace, K-means init; prior elicitation uses stream (1,). Results are
therefore identical across runs and worker counts.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, RngStream, standardize
from .infotheory import MiVector, feature_label_mi, kde_entropy, normalize_mi, vi_from_counts
from .kmeans import DegenerateSampleError, KMeansConfig, assign_nearest, kmeans_fit
from .resample import PriorModel, ResampleScheme, elicit_prior, make_replica
from .validation import contingency, dunn_index

REPLICA_STREAM = 0
PRIOR_STREAM = 1

MEMBER_RESTARTS = 2
BASELINE_RESTARTS = 10


@dataclass(frozen=True)
class EnsembleConfig:
    K: int
    subspace_size: int
    B: int = 100
    scheme: ResampleScheme = ResampleScheme("pbb")
    master_seed: int = 0
    kmeans: KMeansConfig | None = None

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.subspace_size < 1:
            raise ValueError("subspace_size must be >= 1")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.kmeans is not None and self.kmeans.K != self.K:
            raise ValueError("kmeans.K must match ensemble K")

    def member_kmeans(self) -> KMeansConfig:
        return self.kmeans or KMeansConfig(K=self.K, restarts=MEMBER_RESTARTS)


@dataclass(frozen=True)
class ReplicaResult:
    index: int
    subspace: np.ndarray
    partition: np.ndarray | None
    quality_weight: float
    mi: MiVector | None
    degenerate: bool


@dataclass(frozen=True)
class EnsembleReport:
    consensus: np.ndarray
    consensus_replica: int
    feature_importance: np.ndarray
    raw_importance: np.ndarray
    coverage: np.ndarray
    replicas: tuple[ReplicaResult, ...]
    config: EnsembleConfig
    feature_names: tuple[str, ...]
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        def _clean(x: float) -> float | None:
            return None if not np.isfinite(x) else float(x)

        return {
            "config": {
                "K": self.config.K,
                "subspace_size": self.config.subspace_size,
                "B": self.config.B,
                "scheme": self.config.scheme.kind,
                "omega": self.config.scheme.omega,
                "master_seed": self.config.master_seed,
            },
            "feature_names": list(self.feature_names),
            "consensus_labels": [int(v) for v in self.consensus],
            "consensus_replica": int(self.consensus_replica),
            "feature_importance": [_clean(v) for v in self.feature_importance],
            "raw_importance": [_clean(v) for v in self.raw_importance],
            "coverage": [int(v) for v in self.coverage],
            "flags": list(self.flags),
            "replicas": [
                {
                    "index": r.index,
                    "subspace": [int(j) for j in r.subspace],
                    "weight": _clean(r.quality_weight),
                    "degenerate": bool(r.degenerate),
                    "mi_normalized": None if r.mi is None
                    else [float(v) for v in r.mi.normalized],
                }
                for r in self.replicas
            ],
        }


def sample_subspace(p: int, m: int, rng) -> np.ndarray:
    """Uniform random m-subset of {0..p-1}, sorted."""
    if not 1 <= m <= p:
        raise ValueError(f"subspace size {m} out of range [1, {p}]")
    gen = rng.generator() if hasattr(rng, "generator") else rng
    return np.sort(gen.choice(p, size=m, replace=False)).astype(np.int64)


def run_replica(dataset: Dataset, prior: PriorModel | None, cfg: EnsembleConfig,
                b: int, marginal_bits: np.ndarray | None = None) -> ReplicaResult:
    """One bagging round on standardized data: resample, drop out features,
    cluster, extend to all rows, weigh by subspace Dunn, score per-feature MI.

    A replica that cannot be clustered (too few distinct points) or whose
    extension collapses below 2 clusters is marked degenerate with weight 0.
    """
    gen = RngStream(cfg.master_seed, (REPLICA_STREAM, b)).generator()
    sample = make_replica(dataset, cfg.scheme, prior, gen)
    subspace = sample_subspace(dataset.p, cfg.subspace_size, gen)

    try:
        model = kmeans_fit(sample.values[:, subspace], sample.weights,
                           cfg.member_kmeans(), gen)
    except DegenerateSampleError:
        return ReplicaResult(index=b, subspace=subspace, partition=None,
                             quality_weight=0.0, mi=None, degenerate=True)

    labels = assign_nearest(dataset.values, subspace, model.centroids)
    sub_points = dataset.values[:, subspace]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            weight = dunn_index(sub_points, labels)
    except ValueError:
        return ReplicaResult(index=b, subspace=subspace, partition=labels,
                             quality_weight=0.0, mi=None, degenerate=True)

    raw = np.zeros(subspace.size)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i, j in enumerate(subspace):
            known = None if marginal_bits is None else marginal_bits[j]
            if known is not None and np.isnan(known):
                known = None
            raw[i] = feature_label_mi(dataset.values[:, j], labels, marginal_bits=known)
        mi = normalize_mi(raw)
    return ReplicaResult(index=b, subspace=subspace, partition=labels,
                         quality_weight=float(weight), mi=mi, degenerate=False)


def effective_weights(results: list[ReplicaResult] | tuple[ReplicaResult, ...]) -> np.ndarray:
    """Quality weights with the +inf Dunn sentinel replaced by the largest finite one."""
    w = np.array([r.quality_weight for r in results], dtype=float)
    infinite = np.isinf(w)
    if infinite.any():
        finite = w[~infinite & (w > 0)]
        w[infinite] = finite.max() if finite.size else 1.0
    return w


def aggregate_feature_importance(results, p: int) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Quality-weighted mean of normalized MI per feature over covering replicas.

    Returns (importance, coverage, flags); features never covered are NaN.
    """
    usable = [r for r in results if not r.degenerate and r.mi is not None]
    if not usable:
        raise ValueError("no usable replicas to aggregate")
    weights = effective_weights(usable)
    fi = np.full(p, np.nan)
    coverage = np.zeros(p, dtype=np.int64)
    flags: list[str] = []
    for j in range(p):
        num = den = 0.0
        vals = []
        for r, w in zip(usable, weights):
            pos = int(np.searchsorted(r.subspace, j))
            if pos < r.subspace.size and r.subspace[pos] == j:
                coverage[j] += 1
                vals.append(r.mi.normalized[pos])
                num += w * r.mi.normalized[pos]
                den += w
        if coverage[j] == 0:
            continue
        if den > 0:
            fi[j] = num / den
        else:
            fi[j] = float(np.mean(vals))
            flags.append(f"feature {j}: zero total weight, unweighted mean used")
    return fi, coverage, flags


def consensus_partition(results) -> tuple[np.ndarray, int, list[str]]:
    """Realized partition minimizing the quality-weighted sum of VI distances.

    Degenerate replicas join neither the candidate set nor the loss. Ties
    break toward the lowest replica index.
    """
    usable = [r for r in results if not r.degenerate and r.partition is not None]
    if not usable:
        raise ValueError("no usable replicas for consensus")
    flags: list[str] = []
    weights = effective_weights(usable)
    if weights.sum() == 0:
        weights = np.ones(len(usable))
        flags.append("all quality weights zero, uniform consensus weights used")

    nb = len(usable)
    vi = np.zeros((nb, nb))
    for i in range(nb):
        for j in range(i + 1, nb):
            cm = contingency(usable[i].partition, usable[j].partition)
            vi[i, j] = vi[j, i] = vi_from_counts(cm.counts, cm.n)
    losses = vi @ weights
    best = int(np.argmin(losses))
    return usable[best].partition.copy(), usable[best].index, flags


_POOL_STATE: dict = {}


def _pool_init(dataset: Dataset, prior, cfg: EnsembleConfig, marginals) -> None:
    _POOL_STATE["args"] = (dataset, prior, cfg, marginals)


def _pool_run(b: int) -> ReplicaResult:
    dataset, prior, cfg, marginals = _POOL_STATE["args"]
    return run_replica(dataset, prior, cfg, b, marginals)


def marginal_entropies(dataset: Dataset) -> np.ndarray:
    """Per-feature KDE entropy of the full columns; NaN for constant features."""
    out = np.full(dataset.p, np.nan)
    for j in range(dataset.p):
        col = dataset.values[:, j]
        if col.std(ddof=1) > 0:
            out[j] = kde_entropy(col)
    return out


def explain(dataset: Dataset, cfg: EnsembleConfig, workers: int = 1) -> EnsembleReport:
    """Full pipeline: standardize, resample B times with feature dropout,
    aggregate the importance scores and the consensus partition.

    The reported importance divides the quality-weighted aggregate by its
    maximum over covered features, so the top feature scores exactly 1.
    """
    if cfg.subspace_size > dataset.p:
        raise ValueError(f"subspace_size {cfg.subspace_size} exceeds p={dataset.p}")
    if cfg.K > dataset.n:
        raise ValueError(f"K={cfg.K} exceeds n={dataset.n}")
    z = standardize(dataset)
    flags = [f"constant feature dropped to zeros: {z.feature_names[j]}"
             for j in z.constant_features]

    prior = None
    if cfg.scheme.kind == "pbb":
        prior = elicit_prior(z, cfg.K, RngStream(cfg.master_seed, (PRIOR_STREAM,)),
                             KMeansConfig(K=cfg.K, restarts=BASELINE_RESTARTS))
    marginals = marginal_entropies(z)

    if workers > 1 and cfg.B > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                                 initargs=(z, prior, cfg, marginals)) as pool:
            results = list(pool.map(_pool_run, range(cfg.B), chunksize=8))
    else:
        results = [run_replica(z, prior, cfg, b, marginals) for b in range(cfg.B)]

    degenerate = sum(r.degenerate for r in results)
    if degenerate == cfg.B:
        raise ValueError("every replica degenerated; cannot aggregate")
    if degenerate:
        flags.append(f"{degenerate} degenerate replicas excluded")

    fi_raw, coverage, fi_flags = aggregate_feature_importance(results, dataset.p)
    flags.extend(fi_flags)
    consensus, winner, cons_flags = consensus_partition(results)
    flags.extend(cons_flags)

    top = np.nanmax(fi_raw)
    importance = fi_raw / top if top > 0 else fi_raw.copy()
    return EnsembleReport(
        consensus=consensus,
        consensus_replica=winner,
        feature_importance=importance,
        raw_importance=fi_raw,
        coverage=coverage,
        replicas=tuple(results),
        config=cfg,
        feature_names=dataset.feature_names,
        flags=tuple(flags),
    )
