"""Benchmark sweeps: dataset x method x noise level x trial.

A sweep is described by an INI file::

    [bench]
    seed = 2024
    trials = 10
    noise_levels = 0, 10, 20, 30

    [dataset iris]
    path = ../data/iris.csv
    label_column = last
    header = no

    [method fcm]
    preset = fcm

    [method cwfcm]
    preset = cwfcm

Dataset sections also accept ``delimiter`` and ``clusters`` (defaults to the
number of classes).  Method sections take a ``preset`` plus any of
``distance``, ``minkowski_p``, ``weights``, ``init``, ``fuzziness``,
``epsilon``, ``max_iter``, ``normalize`` and ``square_distance``.
Relative paths are resolved against the config file's directory.

One noisy copy of each dataset is drawn per noise level and shared by all
methods and trials.  Trial ``t`` of every method uses the same random
initialization seed, so methods are compared on common random numbers.
Methods with deterministic initialization run a single trial per cell
unless ``collapse_deterministic = no``.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset, NoiseSpec, add_noise, load_csv
from .engine import FcmConfig, fit, preset
from .evaluation import evaluate

log = logging.getLogger(__name__)

COLUMNS = ("dataset", "method", "noise_pct", "trial", "seed", "iterations", "seconds",
           "objective", "error_rate", "accuracy_rate", "rand_index", "purity", "failed")

METRIC_COLUMNS = ("iterations", "seconds", "objective", "error_rate", "accuracy_rate",
                  "rand_index", "purity")
LOWER_IS_BETTER = {"iterations": True, "seconds": True, "objective": True,
                   "error_rate": True, "accuracy_rate": False, "rand_index": False,
                   "purity": False}


@dataclass
class DatasetEntry:
    name: str
    path: Path
    label_column: str = "last"
    delimiter: str = ","
    header: bool = False
    clusters: int | None = None

    def load(self) -> Dataset:
        return load_csv(self.path, self.label_column, self.delimiter, self.header)


@dataclass
class BenchConfig:
    datasets: list
    methods: dict  # name -> preset overrides, including "preset"
    noise_levels: tuple = (0, 10, 20, 30)
    trials: int = 10
    seed: int = 0
    collapse_deterministic: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        for level in self.noise_levels:
            if not 0 <= level <= 100:
                raise ValueError(f"noise level {level} outside [0, 100]")
        if not self.datasets or not self.methods:
            raise ValueError("a sweep needs at least one dataset and one method")

    def method_config(self, name: str, c: int) -> FcmConfig:
        params = dict(self.methods[name])
        return preset(params.pop("preset", "fcm"), c, **params)


_METHOD_KEYS = {
    "distance": str, "minkowski_p": int, "weights": str, "init": str,
    "fuzziness": float, "epsilon": float, "max_iter": int,
}
_METHOD_FLAGS = ("normalize", "square_distance")


def _parse_method(section) -> dict:
    params = {"preset": section.get("preset", "fcm")}
    for key, cast in _METHOD_KEYS.items():
        if key in section:
            params["weight_scheme" if key == "weights" else key] = cast(section[key])
    for key in _METHOD_FLAGS:
        if key in section:
            params[key] = section.getboolean(key)
    unknown = set(section) - set(_METHOD_KEYS) - set(_METHOD_FLAGS) - {"preset"}
    if unknown:
        raise ValueError(f"[{section.name}]: unknown keys {sorted(unknown)}")
    return params


def load_bench_config(path) -> BenchConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser(default_section="__defaults__",
                                       inline_comment_prefixes=("#", ";"))
    parser.read(path)
    base = path.parent
    bench = parser["bench"] if parser.has_section("bench") else {}

    datasets, methods = [], {}
    for name in parser.sections():
        section = parser[name]
        kind, _, label = name.partition(" ")
        label = label.strip()
        if kind == "dataset":
            p = Path(section["path"])
            clusters = section.get("clusters")
            datasets.append(DatasetEntry(
                name=label,
                path=p if p.is_absolute() else base / p,
                label_column=section.get("label_column", "last"),
                delimiter=section.get("delimiter", ",").strip('"') or ",",
                header=section.getboolean("header", False),
                clusters=int(clusters) if clusters else None,
            ))
        elif kind == "method":
            methods[label] = _parse_method(section)
        elif kind != "bench":
            raise ValueError(f"unknown section [{name}]")

    levels = bench.get("noise_levels", "0, 10, 20, 30")
    return BenchConfig(
        datasets=datasets,
        methods=methods,
        noise_levels=tuple(float(v) for v in levels.split(",") if v.strip()),
        trials=int(bench.get("trials", 10)),
        seed=int(bench.get("seed", 0)),
        collapse_deterministic=parser.getboolean("bench", "collapse_deterministic",
                                                 fallback=True),
    )


def _derive_seed(*key) -> int:
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1)[0])


def _fmt_level(level) -> str:
    return f"{level:g}"


@dataclass
class Task:
    dataset: str
    method: str
    noise_pct: float
    trial: int
    seed: int
    data: Dataset
    config: FcmConfig


def plan(cfg: BenchConfig) -> list:
    """Expand a sweep into tasks, in the order rows appear in the CSV."""
    tasks = []
    for di, entry in enumerate(cfg.datasets):
        clean = entry.load()
        c = entry.clusters or clean.n_classes
        for ni, level in enumerate(cfg.noise_levels):
            data = add_noise(clean, NoiseSpec(level, _derive_seed(cfg.seed, 1, di, ni)))
            for name in cfg.methods:
                base_cfg = cfg.method_config(name, c)
                n_trials = 1 if cfg.collapse_deterministic and base_cfg.deterministic else cfg.trials
                for t in range(n_trials):
                    seed = _derive_seed(cfg.seed, 2, di, ni, t)
                    tasks.append(Task(entry.name, name, level, t, seed, data,
                                      base_cfg.replace(seed=seed)))
    return tasks


def run_task(task: Task) -> dict:
    row = {"dataset": task.dataset, "method": task.method, "noise_pct": task.noise_pct,
           "trial": task.trial, "seed": task.seed}
    try:
        result = fit(task.data, task.config)
        report = evaluate(result.crisp_labels, task.data.labels)
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        row.update(failed=1, error=f"{type(exc).__name__}: {exc}")
        return row
    row.update(iterations=result.iterations, seconds=result.wall_time,
               objective=result.objective, failed=0, **report.as_dict())
    return row


def run_bench(cfg: BenchConfig, jobs: int = 1) -> list:
    """Run every task of the sweep; rows come back in plan order."""
    tasks = plan(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_task, tasks, chunksize=4))
    else:
        rows = [run_task(t) for t in tasks]
    for row in rows:
        if row["failed"]:
            log.warning("%s / %s / noise %s / trial %d failed: %s", row["dataset"],
                        row["method"], _fmt_level(row["noise_pct"]), row["trial"], row["error"])
    return rows


def format_rows(rows, timing: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        failed = bool(row["failed"])
        out = [row["dataset"], row["method"], _fmt_level(row["noise_pct"]), row["trial"],
               row["seed"]]
        for col in METRIC_COLUMNS:
            if failed or (col == "seconds" and not timing):
                out.append("")
            elif col == "iterations":
                out.append(str(row[col]))
            elif col == "seconds":
                out.append(f"{row[col]:.6f}")
            else:
                out.append(repr(float(row[col])))
        out.append(int(failed))
        writer.writerow(out)
    return buf.getvalue()


def read_results(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"results file not found: {path}")
    return parse_results(path.read_text())


def parse_results(text: str) -> list:
    """Parse results CSV text into row dicts; blank metric cells become None."""
    reader = csv.DictReader(io.StringIO(text))
    missing = set(COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"results CSV is missing columns {sorted(missing)}")
    rows = []
    for line, rec in enumerate(reader, start=2):
        try:
            row = {"dataset": rec["dataset"], "method": rec["method"],
                   "noise_pct": float(rec["noise_pct"]), "trial": int(rec["trial"]),
                   "seed": int(rec["seed"]), "failed": int(rec["failed"])}
            for col in METRIC_COLUMNS:
                row[col] = float(rec[col]) if rec[col] != "" else None
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed results CSV at line {line}: {exc}") from None
        rows.append(row)
    return rows


def mean_table(rows, metric: str, noise_pct=None):
    """Mean of ``metric`` per (dataset, method) over successful rows.

    Returns ``(datasets, methods, table)`` where ``table[d][m]`` is the mean
    or ``None`` when no successful row exists.
    """
    acc = defaultdict(list)
    datasets, methods = [], []
    for row in rows:
        if noise_pct is not None and row["noise_pct"] != noise_pct:
            continue
        if row["dataset"] not in datasets:
            datasets.append(row["dataset"])
        if row["method"] not in methods:
            methods.append(row["method"])
        if not row["failed"] and row[metric] is not None:
            acc[row["dataset"], row["method"]].append(row[metric])
    table = {d: {m: (float(np.mean(acc[d, m])) if acc[d, m] else None) for m in methods}
             for d in datasets}
    return datasets, methods, table


_SUMMARY_METRICS = (("iterations", "Mean iterations", "{:.1f}"),
                    ("seconds", "Mean seconds per fit", "{:.4f}"),
                    ("error_rate", "Mean error rate (%)", "{:.3f}"),
                    ("rand_index", "Mean Rand index", "{:.3f}"),
                    ("purity", "Mean purity", "{:.3f}"))


def _markdown_table(header, body):
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in body]
    return "\n".join(lines)


def summarize(rows) -> str:
    """Markdown summary tables; every value is derived from ``rows`` alone."""
    out = ["# Benchmark summary", ""]
    levels = sorted({r["noise_pct"] for r in rows})
    for level in levels:
        out += [f"## Noise {_fmt_level(level)}%", ""]
        for metric, title, fmt in _SUMMARY_METRICS:
            datasets, methods, table = mean_table(rows, metric, level)
            body = [[d] + [fmt.format(table[d][m]) if table[d][m] is not None else "-"
                           for m in methods] for d in datasets]
            out += [f"### {title}", "", _markdown_table(["dataset"] + methods, body), ""]

    counts = defaultdict(set)
    failures = defaultdict(int)
    for r in rows:
        counts[r["method"]].add(r["trial"])
        failures[r["method"]] += r["failed"]
    most = max((len(t) for t in counts.values()), default=0)
    notes = [f"- {m}: deterministic initialization, {len(trials)} trial per cell"
             for m, trials in counts.items() if len(trials) < most]
    notes += [f"- {m}: {n} failed run(s) excluded from means"
              for m, n in failures.items() if n]
    if notes:
        out += ["## Notes", ""] + notes + [""]
    return "\n".join(out)

