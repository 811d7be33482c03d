"""Explainable bagged clustering.

Ensemble K-means over bootstrap replicas with random feature dropout,
Dunn-weighted mutual-information feature importance, and a variation-of-
information consensus partition.
"""

from .data import Dataset, RngStream, load_csv, standardize, write_csv
from .ensemble import (
    EnsembleConfig,
    EnsembleReport,
    ReplicaResult,
    aggregate_feature_importance,
    consensus_partition,
    explain,
    run_replica,
    sample_subspace,
)
from .infotheory import (
    KdeModel,
    MiVector,
    discrete_entropy,
    feature_label_mi,
    kde_entropy,
    normalize_mi,
    silverman_bandwidth,
    variation_of_information,
)
from .kmeans import KMeansConfig, KMeansModel, assign_nearest, kmeans_fit
from .resample import (
    PriorModel,
    ResampleScheme,
    WeightedSample,
    basic_replica,
    efron_replica,
    elicit_prior,
    pbb_replica,
)
from .synthgen import gen_correlation, gen_illustrative, gen_overlap, gen_proportion
from .validation import (
    ContingencyMatrix,
    adjusted_rand,
    contingency,
    dunn_index,
    fowlkes_mallows,
    rand_index,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "RngStream", "load_csv", "standardize", "write_csv",
    "EnsembleConfig", "EnsembleReport", "ReplicaResult", "explain",
    "run_replica", "sample_subspace", "aggregate_feature_importance",
    "consensus_partition",
    "KdeModel", "MiVector", "discrete_entropy", "feature_label_mi",
    "kde_entropy", "normalize_mi", "silverman_bandwidth",
    "variation_of_information",
    "KMeansConfig", "KMeansModel", "assign_nearest", "kmeans_fit",
    "PriorModel", "ResampleScheme", "WeightedSample", "basic_replica",
    "efron_replica", "elicit_prior", "pbb_replica",
    "gen_correlation", "gen_illustrative", "gen_overlap", "gen_proportion",
    "ContingencyMatrix", "adjusted_rand", "contingency", "dunn_index",
    "fowlkes_mallows", "rand_index",
]
