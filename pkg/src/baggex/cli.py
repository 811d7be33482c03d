"""Command-line front end: dataset generation, explanation runs, benchmarks.

Benchmark cells are addressed by (seed, replication, method, m): the dataset
for replication r comes from stream (0, r), a proposed-method cell seeds its
ensemble from stream (1, r, method_code, m), and the K-means baseline draws
from stream (2, r). Cell results are therefore reproducible in isolation and
independent of worker count. Wall-clock numbers go to stdout and a separate
timing file so the report files stay byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset, RngStream, load_csv, standardize, write_csv
from .ensemble import BASELINE_RESTARTS, EnsembleConfig, explain
from .kmeans import KMeansConfig, kmeans_fit
from .resample import ResampleScheme
from .synthgen import GENERATORS
from .validation import adjusted_rand, fowlkes_mallows

METHOD_CODES = {"basic": 0, "efron": 1, "bbc": 2}
SCHEME_OF_METHOD = {"basic": "basic", "efron": "efron", "bbc": "pbb"}
ALL_METHODS = ("basic", "efron", "bbc", "kmeans")

DEFAULTS = {
    "B": 100,
    "scheme": "bbc",
    "omega": 0.1,
    "replications": 20,
    "workers": 1,
}


class CliError(Exception):
    pass


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"config line is not key=value: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _resolve(name: str, flag_value, file_cfg: dict[str, str], cast):
    """Precedence: command-line flag, then config file, then built-in default."""
    if flag_value is not None:
        return flag_value
    if name in file_cfg:
        return cast(file_cfg[name])
    if name == "seed":
        env = os.environ.get("BAGGEX_SEED")
        if env is not None:
            return int(env)
        return 0
    return DEFAULTS.get(name)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("subspace sizes must be positive")
    return values


def _ensemble_config(K: int, m: int, B: int, scheme: str, omega: float,
                     master_seed: int) -> EnsembleConfig:
    return EnsembleConfig(
        K=K,
        subspace_size=m,
        B=B,
        scheme=ResampleScheme(SCHEME_OF_METHOD[scheme], omega=omega),
        master_seed=master_seed,
    )


def _load_input(path: str, label_column: str | None, has_header: bool) -> Dataset:
    if not os.path.exists(path):
        raise CliError(f"no such file: {path}")
    return load_csv(path, has_header=has_header, label_column=label_column)


# ---------------------------------------------------------------- generate

def cmd_generate(args: argparse.Namespace) -> int:
    generator = GENERATORS[args.name]
    dataset, _ = generator(RngStream(args.seed))
    write_csv(dataset, args.out)
    print(f"{args.name}: wrote {dataset.n} rows x {dataset.p} features "
          f"(+ truth column) to {args.out}")
    return 0


# ---------------------------------------------------------------- explain

def _print_fi_table(report) -> None:
    order = np.argsort(-np.nan_to_num(report.feature_importance, nan=-1.0))
    print(f"{'rank':>4}  {'feature':<16} {'importance':>10}  {'coverage':>8}")
    for rank, j in enumerate(order, start=1):
        fi = report.feature_importance[j]
        shown = "missing" if np.isnan(fi) else f"{fi:.4f}"
        print(f"{rank:>4}  {report.feature_names[j]:<16} {shown:>10}  "
              f"{int(report.coverage[j]):>8}")


def cmd_explain(args: argparse.Namespace) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    B = _resolve("B", args.B, file_cfg, int)
    scheme = _resolve("scheme", args.scheme, file_cfg, str)
    omega = _resolve("omega", args.omega, file_cfg, float)
    seed = _resolve("seed", args.seed, file_cfg, int)
    workers = _resolve("workers", args.workers, file_cfg, int)
    if scheme not in SCHEME_OF_METHOD:
        raise CliError(f"unknown scheme: {scheme}")

    dataset = _load_input(args.input, args.label_column, not args.no_header)
    if args.m > dataset.p:
        raise CliError(f"--m {args.m} exceeds the {dataset.p} available features")
    if args.K > dataset.n:
        raise CliError(f"--K {args.K} exceeds the {dataset.n} available rows")

    cfg = _ensemble_config(args.K, args.m, B, scheme, omega, seed)
    started = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = explain(dataset, cfg, workers=workers)
    elapsed = time.perf_counter() - started

    os.makedirs(args.out_dir, exist_ok=True)
    labels_path = os.path.join(args.out_dir, "labels.csv")
    with open(labels_path, "w", encoding="utf-8") as fh:
        fh.write("row,label\n")
        for i, lab in enumerate(report.consensus):
            fh.write(f"{i},{int(lab)}\n")
    imp_path = os.path.join(args.out_dir, "importance.csv")
    with open(imp_path, "w", encoding="utf-8") as fh:
        fh.write("feature,importance,coverage\n")
        for j, name in enumerate(report.feature_names):
            fi = report.feature_importance[j]
            shown = "" if np.isnan(fi) else f"{fi:.17g}"
            fh.write(f"{name},{shown},{int(report.coverage[j])}\n")
    report_path = os.path.join(args.out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")

    _print_fi_table(report)
    if dataset.truth_labels is not None:
        ari = adjusted_rand(report.consensus, dataset.truth_labels)
        fmi = fowlkes_mallows(report.consensus, dataset.truth_labels)
        print(f"ARI vs truth: {ari:.4f}   FMI vs truth: {fmi:.4f}")
    print(f"wrote {labels_path}, {imp_path}, {report_path} ({elapsed:.1f}s)")
    return 0


# ---------------------------------------------------------------- benchmark

@dataclass(frozen=True)
class CellResult:
    replication: int
    method: str
    m: int | None
    ari: float
    fmi: float
    importance: tuple[float, ...] | None


_BENCH_STATE: dict = {}


def _bench_init(state: dict) -> None:
    _BENCH_STATE.update(state)


def _dataset_for_replication(r: int):
    if _BENCH_STATE["csv_dataset"] is not None:
        return _BENCH_STATE["csv_dataset"]
    generator = GENERATORS[_BENCH_STATE["dataset_name"]]
    dataset, _ = generator(RngStream(_BENCH_STATE["seed"], (0, r)))
    return dataset


def _cell_seed(seed: int, r: int, method: str, m: int) -> int:
    seq = np.random.SeedSequence(seed, spawn_key=(1, r, METHOD_CODES[method], m))
    return int(seq.generate_state(1, np.uint64)[0])


def _bench_task(task: tuple[int, str, int | None]) -> CellResult:
    r, method, m = task
    dataset = _dataset_for_replication(r)
    truth = dataset.truth_labels
    seed = _BENCH_STATE["seed"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if method == "kmeans":
            z = standardize(dataset)
            cfg = KMeansConfig(K=_BENCH_STATE["K"], restarts=BASELINE_RESTARTS)
            model = kmeans_fit(z.values, np.ones(z.n), cfg, RngStream(seed, (2, r)))
            labels = model.replica_labels
            importance = None
        else:
            cfg = _ensemble_config(_BENCH_STATE["K"], m, _BENCH_STATE["B"], method,
                                   _BENCH_STATE["omega"], _cell_seed(seed, r, method, m))
            report = explain(dataset, cfg, workers=1)
            labels = report.consensus
            importance = tuple(float(v) for v in report.feature_importance)
        ari = adjusted_rand(labels, truth)
        fmi = fowlkes_mallows(labels, truth)
    return CellResult(replication=r, method=method, m=m, ari=ari, fmi=fmi,
                      importance=importance)


def run_benchmark(dataset_name: str | None, csv_dataset: Dataset | None, K: int,
                  methods: list[str], m_values: list[int], replications: int,
                  seed: int, B: int, omega: float, workers: int = 1) -> dict:
    """Run every (replication, method, m) cell and aggregate mean/sd per cell."""
    tasks: list[tuple[int, str, int | None]] = []
    for r in range(replications):
        for method in methods:
            if method == "kmeans":
                tasks.append((r, "kmeans", None))
            else:
                for m in m_values:
                    tasks.append((r, method, m))

    state = {
        "dataset_name": dataset_name,
        "csv_dataset": csv_dataset,
        "seed": seed,
        "K": K,
        "B": B,
        "omega": omega,
    }
    started = time.perf_counter()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_bench_init,
                                 initargs=(state,)) as pool:
            results = list(pool.map(_bench_task, tasks))
    else:
        _bench_init(state)
        results = [_bench_task(t) for t in tasks]
    elapsed = time.perf_counter() - started

    feature_names = (csv_dataset.feature_names if csv_dataset is not None
                     else _peek_feature_names(dataset_name, seed))
    cells = []
    for method in methods:
        ms: list[int | None] = [None] if method == "kmeans" else list(m_values)
        for m in ms:
            rows = sorted((c for c in results if c.method == method and c.m == m),
                          key=lambda c: c.replication)
            aris = np.array([c.ari for c in rows])
            fmis = np.array([c.fmi for c in rows])
            cell = {
                "method": method,
                "m": m,
                "ari_mean": float(aris.mean()),
                "ari_sd": float(aris.std(ddof=1)) if len(rows) > 1 else 0.0,
                "fmi_mean": float(fmis.mean()),
                "fmi_sd": float(fmis.std(ddof=1)) if len(rows) > 1 else 0.0,
                "ari_values": [float(v) for v in aris],
                "fmi_values": [float(v) for v in fmis],
            }
            if rows[0].importance is not None:
                fi = np.array([c.importance for c in rows])
                cell["importance_mean"] = [float(v) for v in fi.mean(axis=0)]
                cell["importance_sd"] = [
                    float(v) for v in (fi.std(axis=0, ddof=1) if len(rows) > 1
                                       else np.zeros(fi.shape[1]))
                ]
            cells.append(cell)
    return {
        "dataset": dataset_name or "csv",
        "K": K,
        "B": B,
        "omega": omega,
        "seed": seed,
        "replications": replications,
        "methods": list(methods),
        "m_values": list(m_values),
        "feature_names": list(feature_names),
        "cells": cells,
        "_elapsed_seconds": elapsed,
    }


def _peek_feature_names(dataset_name: str, seed: int) -> tuple[str, ...]:
    dataset, _ = GENERATORS[dataset_name](RngStream(seed, (0, 0)))
    return dataset.feature_names


def _write_benchmark_outputs(report: dict, out_dir: str, plot_data: bool) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    elapsed = report.pop("_elapsed_seconds")

    csv_path = os.path.join(out_dir, "benchmark.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("dataset,method,m,metric,mean,sd,R\n")
        for cell in report["cells"]:
            m_txt = "" if cell["m"] is None else str(cell["m"])
            for metric in ("ari", "fmi"):
                fh.write(f"{report['dataset']},{cell['method']},{m_txt},{metric},"
                         f"{cell[f'{metric}_mean']:.17g},{cell[f'{metric}_sd']:.17g},"
                         f"{report['replications']}\n")
    written.append(csv_path)

    json_path = os.path.join(out_dir, "benchmark.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    written.append(json_path)

    if plot_data:
        for metric in ("ari", "fmi"):
            plot_path = os.path.join(out_dir, f"plot_{report['dataset']}_{metric}.csv")
            with open(plot_path, "w", encoding="utf-8") as fh:
                fh.write("m,method,mean,sd\n")
                for cell in report["cells"]:
                    if cell["m"] is None:
                        continue
                    fh.write(f"{cell['m']},{cell['method']},"
                             f"{cell[f'{metric}_mean']:.17g},{cell[f'{metric}_sd']:.17g}\n")
            written.append(plot_path)

    timing_path = os.path.join(out_dir, "benchmark_timing.json")
    with open(timing_path, "w", encoding="utf-8") as fh:
        json.dump({"elapsed_seconds": elapsed}, fh, indent=2)
        fh.write("\n")
    return written


def cmd_benchmark(args: argparse.Namespace) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    B = _resolve("B", args.B, file_cfg, int)
    omega = _resolve("omega", args.omega, file_cfg, float)
    seed = _resolve("seed", args.seed, file_cfg, int)
    workers = _resolve("workers", args.workers, file_cfg, int)
    replications = _resolve("replications", args.replications, file_cfg, int)

    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.methods == "all":
        methods = list(ALL_METHODS)
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise CliError(f"unknown method(s): {', '.join(unknown)}")

    csv_dataset = None
    dataset_name = None
    if args.dataset in GENERATORS:
        dataset_name = args.dataset
    else:
        csv_dataset = _load_input(args.dataset, args.label_column, not args.no_header)
        if csv_dataset.truth_labels is None:
            raise CliError("benchmark scoring needs a truth column; pass --label-column")

    report = run_benchmark(dataset_name, csv_dataset, args.K, methods, args.m,
                           replications, seed, B, omega, workers)
    elapsed = report["_elapsed_seconds"]
    written = _write_benchmark_outputs(report, args.out_dir, args.plot_data)
    for cell in report["cells"]:
        m_txt = "-" if cell["m"] is None else str(cell["m"])
        print(f"{report['dataset']:<14} {cell['method']:<7} m={m_txt:<3} "
              f"ARI {cell['ari_mean']:.2f} +/- {cell['ari_sd']:.2f}   "
              f"FMI {cell['fmi_mean']:.2f} +/- {cell['fmi_sd']:.2f}")
    print(f"wrote {', '.join(written)} ({elapsed:.1f}s)")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baggex",
        description="Explainable bagged clustering with feature dropout",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    gen.add_argument("name", choices=sorted(GENERATORS))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=cmd_generate)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--K", type=_positive_int, required=True,
                        help="number of clusters")
    common.add_argument("--B", type=_positive_int, default=None,
                        help="ensemble replicas (default 100)")
    common.add_argument("--omega", type=float, default=None,
                        help="pbb prior weight (default 0.1)")
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default $BAGGEX_SEED or 0)")
    common.add_argument("--workers", type=_positive_int, default=None,
                        help="parallel workers (default 1)")
    common.add_argument("--config", default=None, help="key=value config file")
    common.add_argument("--label-column", default=None,
                        help="CSV column holding ground-truth labels")
    common.add_argument("--no-header", action="store_true",
                        help="input CSV has no header row")
    common.add_argument("--out-dir", default=".", help="output directory")

    exp = sub.add_parser("explain", parents=[common],
                         help="run the ensemble on a CSV and emit reports")
    exp.add_argument("input", help="input CSV file")
    exp.add_argument("--m", type=_positive_int, required=True, help="subspace size")
    exp.add_argument("--scheme", choices=sorted(SCHEME_OF_METHOD), default=None,
                     help="resampling scheme (default bbc)")
    exp.set_defaults(func=cmd_explain)

    ben = sub.add_parser("benchmark", parents=[common],
                         help="replication study over methods and subspace sizes")
    ben.add_argument("dataset", help="generator name or CSV path")
    ben.add_argument("--m", type=_int_list, required=True,
                     help="comma-separated subspace sizes")
    ben.add_argument("--methods", default="all",
                     help="comma list from basic,efron,bbc,kmeans (default all)")
    ben.add_argument("--replications", type=_positive_int, default=None,
                     help="independent replications R (default 20)")
    ben.add_argument("--plot-data", action="store_true",
                     help="also emit per-m series files")
    ben.set_defaults(func=cmd_benchmark)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
