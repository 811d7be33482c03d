"""Dataset container, CSV I/O, standardization, and seeded RNG streams."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

# Reals are written with 17 significant digits so that float64 round-trips.
FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream addressed by (master_seed, stream_id).

    Streams are derived by seed-sequence spawning, so the draw sequence of a
    stream depends only on its address, never on creation order or on which
    worker materializes it.
    """

    master_seed: int
    stream_id: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(i < 0 for i in self.stream_id):
            raise ValueError("stream_id components must be nonnegative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_id)
        return np.random.default_rng(seq)

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id + tuple(ids))


@dataclass(frozen=True)
class Dataset:
    """An n x p matrix of finite reals with named features and optional truth labels."""

    values: np.ndarray
    feature_names: tuple[str, ...]
    truth_labels: np.ndarray | None = None
    constant_features: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if values.ndim != 2:
            raise ValueError("values must be a 2-d matrix")
        n, p = values.shape
        if n < 2:
            raise ValueError(f"need at least 2 rows, got {n}")
        if p < 1:
            raise ValueError("need at least 1 feature")
        if not np.isfinite(values).all():
            raise ValueError("values must all be finite")
        if len(self.feature_names) != p:
            raise ValueError("feature_names length must match column count")
        if len(set(self.feature_names)) != p:
            raise ValueError("feature_names must be unique")
        if self.truth_labels is not None:
            labels = np.asarray(self.truth_labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError("truth_labels must have one entry per row")
            object.__setattr__(self, "truth_labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def load_csv(path: str, has_header: bool = True, label_column: str | None = None) -> Dataset:
    """Read a numeric CSV into a Dataset.

    The optional label column is factorized into integer codes and moved to
    ``truth_labels``. Cell coordinates in parse errors are 1-based file
    coordinates (header line included).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}")
    with fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{path}: empty file")

    if has_header:
        header = [h.strip() for h in rows[0]]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise ValueError(f"{path}: duplicate header names: {', '.join(dupes)}")
        data_rows = rows[1:]
        first_line = 2
    else:
        header = [f"x{j}" for j in range(len(rows[0]))]
        data_rows = rows
        first_line = 1

    label_idx: int | None = None
    if label_column is not None:
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not found")
        label_idx = header.index(label_column)

    ncol = len(header)
    values = np.empty((len(data_rows), ncol - (label_idx is not None)), dtype=float)
    raw_labels: list[str] = []
    for i, row in enumerate(data_rows):
        if len(row) != ncol:
            raise ValueError(
                f"{path}: row {first_line + i} has {len(row)} cells, expected {ncol}"
            )
        k = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                values[i, k] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric cell {cell.strip()!r} at row {first_line + i},"
                    f" col {j + 1}"
                )
            k += 1

    names = tuple(h for j, h in enumerate(header) if j != label_idx)
    truth = None
    if label_idx is not None:
        _, truth = np.unique(raw_labels, return_inverse=True)
    return Dataset(values=values, feature_names=names, truth_labels=truth)


def write_csv(dataset: Dataset, path: str) -> None:
    """Write a Dataset as CSV with a header, appending a ``truth`` column if present."""
    header = list(dataset.feature_names)
    if dataset.truth_labels is not None:
        header.append("truth")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n):
            row = [FLOAT_FMT % v for v in dataset.values[i]]
            if dataset.truth_labels is not None:
                row.append(str(int(dataset.truth_labels[i])))
            writer.writerow(row)


def standardize(dataset: Dataset) -> Dataset:
    """Center each feature to mean 0 and scale to sample sd 1 (n-1 denominator).

    Constant columns cannot be scaled; they map to all zeros, are recorded in
    ``constant_features`` and reported through a RuntimeWarning.
    """
    values = dataset.values
    mean = values.mean(axis=0)
    sd = values.std(axis=0, ddof=1)
    constant = np.where(sd == 0)[0]
    if constant.size:
        names = ", ".join(dataset.feature_names[j] for j in constant)
        warnings.warn(f"constant feature(s) mapped to zeros: {names}", RuntimeWarning)
    safe_sd = np.where(sd == 0, 1.0, sd)
    out = (values - mean) / safe_sd
    out[:, constant] = 0.0
    return Dataset(
        values=out,
        feature_names=dataset.feature_names,
        truth_labels=dataset.truth_labels,
        constant_features=tuple(int(j) for j in constant),
    )
