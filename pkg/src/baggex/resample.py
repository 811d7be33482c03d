"""Bootstrap replica construction: Basic (clone), Efron, and proper Bayesian.

The proper-Bayesian scheme realizes the posterior Dirichlet process with
baseline mixing a fitted prior (mass k) and the empirical distribution
(mass n): the replica carries every observed row plus round(k) rows synthesized
from the prior, with a symmetric Dirichlet weight vector over all atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .kmeans import KMeansConfig, kmeans_fit

SCHEME_KINDS = ("basic", "efron", "pbb")


@dataclass(frozen=True)
class ResampleScheme:
    kind: str
    omega: float = 0.1
    replica_size: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"kind must be one of {SCHEME_KINDS}")
        if not 0.0 <= self.omega < 1.0:
            raise ValueError("omega must lie in [0, 1)")
        if self.replica_size is not None and self.replica_size < 1:
            raise ValueError("replica_size must be >= 1")


@dataclass(frozen=True)
class WeightedSample:
    """Replica rows with nonnegative weights.

    ``source_rows[i]`` is the index of row i in the source dataset, or -1 for
    a row synthesized from the prior.
    """

    values: np.ndarray
    weights: np.ndarray
    source_rows: np.ndarray

    def __post_init__(self) -> None:
        if (self.weights < 0).any():
            raise ValueError("weights must be nonnegative")
        if self.weights.sum() <= 0:
            raise ValueError("weights must have positive total")
        if not (len(self.values) == len(self.weights) == len(self.source_rows)):
            raise ValueError("values, weights and source_rows must align")


@dataclass(frozen=True)
class PriorModel:
    """Diagonal Gaussian mixture elicited from a pilot clustering."""

    component_means: np.ndarray
    component_sds: np.ndarray
    mixture_weights: np.ndarray

    def __post_init__(self) -> None:
        if abs(self.mixture_weights.sum() - 1.0) > 1e-12:
            raise ValueError("mixture_weights must sum to 1")
        if (self.component_sds < 0).any():
            raise ValueError("component sds must be nonnegative")


def basic_replica(dataset: Dataset, rng) -> WeightedSample:
    """Clone of the dataset: every row once with unit weight."""
    n = dataset.n
    return WeightedSample(
        values=dataset.values,
        weights=np.ones(n),
        source_rows=np.arange(n, dtype=np.int64),
    )


def efron_replica(dataset: Dataset, rng) -> WeightedSample:
    """Resampling with replacement as multinomial integer weights summing to n."""
    gen = rng.generator() if hasattr(rng, "generator") else rng
    n = dataset.n
    weights = gen.multinomial(n, np.full(n, 1.0 / n)).astype(float)
    return WeightedSample(
        values=dataset.values,
        weights=weights,
        source_rows=np.arange(n, dtype=np.int64),
    )


def elicit_prior(dataset: Dataset, K: int, rng,
                 kmeans_cfg: KMeansConfig | None = None) -> PriorModel:
    """Fit a diagonal Gaussian mixture from a multi-restart K-means pilot run."""
    if dataset.n < K:
        raise ValueError("need at least K rows to elicit a prior")
    cfg = kmeans_cfg or KMeansConfig(K=K)
    model = kmeans_fit(dataset.values, np.ones(dataset.n), cfg, rng)
    p = dataset.p
    means = np.zeros((K, p))
    sds = np.zeros((K, p))
    props = np.zeros(K)
    for k in range(K):
        rows = dataset.values[model.replica_labels == k]
        props[k] = rows.shape[0] / dataset.n
        if rows.shape[0] >= 1:
            means[k] = rows.mean(axis=0)
        if rows.shape[0] >= 2:
            sds[k] = rows.std(axis=0, ddof=1)
    return PriorModel(component_means=means, component_sds=sds, mixture_weights=props)


def prior_atom_count(n: int, omega: float) -> int:
    """Number of synthesized prior atoms: round(k) with k = omega*n/(1-omega)."""
    return int(round(omega * n / (1.0 - omega)))


def pbb_replica(dataset: Dataset, prior: PriorModel, scheme: ResampleScheme,
                rng) -> WeightedSample:
    """Posterior-Dirichlet-process replica.

    Atoms are the n observed rows plus J = round(k) prior draws, so the
    synthesized fraction equals the prior weight omega = k/(k+n). Weights are
    Dirichlet with symmetric concentration (n+k) split evenly over the atoms;
    omega = 0 degenerates to Dirichlet(1) weights over the data alone.
    """
    if scheme.kind != "pbb":
        raise ValueError("pbb_replica requires a pbb scheme")
    gen = rng.generator() if hasattr(rng, "generator") else rng
    n = dataset.n
    omega = scheme.omega
    k_mass = omega * n / (1.0 - omega)
    J = prior_atom_count(n, omega)
    if J > 0:
        components = gen.choice(prior.mixture_weights.size, size=J,
                                p=prior.mixture_weights)
        noise = gen.standard_normal((J, dataset.p))
        synth = prior.component_means[components] + noise * prior.component_sds[components]
        values = np.vstack([dataset.values, synth])
    else:
        values = dataset.values
    m = n + J
    weights = gen.dirichlet(np.full(m, (n + k_mass) / m))
    source = np.concatenate([np.arange(n, dtype=np.int64),
                             np.full(J, -1, dtype=np.int64)])
    return WeightedSample(values=values, weights=weights, source_rows=source)


def make_replica(dataset: Dataset, scheme: ResampleScheme,
                 prior: PriorModel | None, rng) -> WeightedSample:
    if scheme.kind == "basic":
        return basic_replica(dataset, rng)
    if scheme.kind == "efron":
        return efron_replica(dataset, rng)
    if prior is None:
        raise ValueError("pbb scheme requires an elicited prior")
    return pbb_replica(dataset, prior, scheme, rng)
