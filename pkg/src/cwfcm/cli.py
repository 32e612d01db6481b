"""Command-line entry point: ``cwfcm {cluster,bench,stats,noise}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .dataset import NoiseSpec, add_noise, load_csv, write_csv
from .distance import METRICS
from .engine import INITS, PRESETS, EmptyClusterError, fit, preset
from .evaluation import evaluate
from .stats import ScoreMatrix, friedman, nemenyi
from .weighting import SCHEMES

def _add_dataset_args(p, required=True):
    p.add_argument("--dataset", required=required, help="delimited text file with a label column")
    p.add_argument("--label-column", default="last",
                   help="0-based index of the label column, or 'last' (default)")
    p.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    p.add_argument("--header", action="store_true", help="first row holds column names")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwfcm",
        description="Fuzzy c-means with weighted distances, validation and benchmark sweeps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster one dataset and report validation scores")
    _add_dataset_args(p)
    p.add_argument("--method", default="cwfcm", choices=sorted(PRESETS),
                   help="preset the other flags override (default cwfcm)")
    p.add_argument("--clusters", type=int, help="number of clusters (default: number of classes)")
    p.add_argument("--distance", choices=METRICS)
    p.add_argument("--minkowski-p", type=int, help="Minkowski order (default 3)")
    p.add_argument("--weights", choices=SCHEMES, help="feature weighting scheme")
    p.add_argument("--init", choices=INITS, help="random or sf (deterministic)")
    p.add_argument("--fuzziness", type=float, help="fuzziness exponent (default 2)")
    p.add_argument("--epsilon", type=float, help="stop when |P(t)-P(t-1)| < epsilon (default 1e-5)")
    p.add_argument("--max-iter", type=int, help="iteration cap (default 100)")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None,
                   help="min-max scale every feature before clustering")
    p.add_argument("--square-distance", action=argparse.BooleanOptionalAction, default=None,
                   help="use d**2 (default for all presets except cwfcm) rather than d")
    p.add_argument("--seed", type=int, default=0, help="seed for random initialization")
    p.add_argument("--output", help="write per-point labels and memberships to this CSV")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown",
                   help="report format on standard output")

    p = sub.add_parser("bench", help="run a benchmark sweep described by an INI file")
    p.add_argument("config", help="sweep configuration (see configs/)")
    p.add_argument("--output", required=True, help="results CSV path")
    p.add_argument("--summary", help="markdown summary path (default: standard output)")
    p.add_argument("--seed", type=int, help="override the base seed")
    p.add_argument("--trials", type=int, help="override trials per stochastic cell")
    p.add_argument("--noise", help="override noise levels, comma-separated percentages")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--timing", action=argparse.BooleanOptionalAction, default=True,
                   help="record wall time; --no-timing leaves 'seconds' blank so "
                        "reruns are byte-identical")

    p = sub.add_parser("stats", help="Friedman and Nemenyi tests on a results CSV")
    p.add_argument("results", help="CSV written by 'cwfcm bench'")
    p.add_argument("--metric", default="error_rate", choices=bench.METRIC_COLUMNS)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--noise", type=float, help="restrict to one noise level")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")

    p = sub.add_parser("noise", help="write a copy of a dataset with attribute noise")
    _add_dataset_args(p)
    p.add_argument("--noise", type=float, required=True, help="noise level in percent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    return parser


def _table(rows, fmt):
    if fmt == "csv":
        return "\n".join(",".join(str(c) for c in r) for r in rows)
    head, body = rows[0], rows[1:]
    lines = ["| " + " | ".join(str(c) for c in head) + " |", "|" + "---|" * len(head)]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in body]
    return "\n".join(lines)


def cmd_cluster(args) -> int:
    data = load_csv(args.dataset, args.label_column, args.delimiter, args.header)
    overrides = {k: v for k, v in dict(
        distance=args.distance, minkowski_p=args.minkowski_p, weight_scheme=args.weights,
        init=args.init, fuzziness=args.fuzziness, epsilon=args.epsilon,
        max_iter=args.max_iter, normalize=args.normalize,
        square_distance=args.square_distance).items() if v is not None}
    cfg = preset(args.method, args.clusters or data.n_classes, seed=args.seed, **overrides)
    result = fit(data, cfg)
    report = evaluate(result.crisp_labels, data.labels)

    rows = [("quantity", "value"),
            ("dataset", data.name), ("method", args.method),
            ("distance", cfg.distance.kind), ("weights", cfg.weight_scheme),
            ("init", cfg.init), ("clusters", cfg.c),
            ("feature_weights", " ".join(f"{w:.4f}" for w in result.weights)),
            ("iterations", result.iterations), ("converged", result.converged),
            ("seconds", f"{result.wall_time:.4f}"),
            ("objective", f"{result.objective:.6g}"),
            ("error_rate", f"{report.error_rate:.3f}"),
            ("accuracy_rate", f"{report.accuracy_rate:.3f}"),
            ("misclassified", report.misclassified),
            ("rand_index", f"{report.rand_index:.4f}"),
            ("purity", f"{report.purity:.4f}")]
    print(_table(rows, args.format))

    if args.output:
        with open(args.output, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "class", "cluster"]
                            + [f"mu_{k}" for k in range(cfg.c)])
            for i, (y, k, mu) in enumerate(zip(data.labels, result.crisp_labels,
                                               result.partition)):
                writer.writerow([i, data.class_names[y], int(k)] + [repr(float(u)) for u in mu])
    return 0


def cmd_bench(args) -> int:
    cfg = bench.load_bench_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.noise is not None:
        changes["noise_levels"] = tuple(float(v) for v in args.noise.split(","))
    cfg = dataclasses.replace(cfg, **changes)

    rows = bench.run_bench(cfg, jobs=args.jobs)
    text = bench.format_rows(rows, timing=args.timing)
    Path(args.output).write_text(text)
    summary = bench.summarize(bench.parse_results(text))
    if args.summary:
        Path(args.summary).write_text(summary + "\n")
    else:
        print(summary)
    failed = sum(r["failed"] for r in rows)
    if failed:
        print(f"{failed} of {len(rows)} runs failed", file=sys.stderr)
    return 1 if failed else 0


def stats_report(rows, metric="error_rate", alpha=0.05, noise=None, fmt="markdown") -> str:
    datasets, methods, table = bench.mean_table(rows, metric, noise)
    complete = [d for d in datasets if all(table[d][m] is not None for m in methods)]
    dropped = [d for d in datasets if d not in complete]
    if len(methods) < 2 or len(complete) < 2:
        raise ValueError(f"need at least 2 methods and 2 complete datasets for {metric!r}, "
                         f"got {len(methods)} methods and {len(complete)} datasets")
    scores = ScoreMatrix([[table[d][m] for m in methods] for d in complete],
                         tuple(complete), tuple(methods), bench.LOWER_IS_BETTER[metric])
    fr = friedman(scores, alpha)
    p = nemenyi(scores)

    out = []
    title = f"Friedman test on {metric}" + (f" at noise {noise:g}%" if noise is not None else "")
    if fmt == "markdown":
        out += [f"## {title}", ""]
    out.append(_table([("quantity", "value"),
                       ("Q (observed)", f"{fr.q_statistic:.4f}"),
                       ("Q (critical)", f"{fr.critical_value:.4f}"),
                       ("DF", fr.degrees_of_freedom),
                       ("p-value", f"{fr.p_value:.4f}"),
                       ("alpha", f"{alpha:g}"),
                       ("datasets", len(complete))], fmt))
    out.append("")
    if fmt == "markdown":
        out += ["## Mean ranks", ""]
    out.append(_table([("method", "mean_rank")]
                      + [(m, f"{r:.3f}") for m, r in zip(methods, fr.mean_ranks)], fmt))
    out.append("")
    if fmt == "markdown":
        out += ["## Nemenyi p-values (* marks p < alpha)", ""]
    body = [[methods[i]] + [f"{p[i, j]:.4f}" + ("*" if i != j and p[i, j] < alpha else "")
                            for j in range(len(methods))] for i in range(len(methods))]
    out.append(_table([["method"] + list(methods)] + body, fmt))
    sig = [(methods[i], methods[j]) for i in range(len(methods))
           for j in range(i + 1, len(methods)) if p[i, j] < alpha]
    out.append("")
    if sig:
        out += [f"significant: {a} vs {b}" for a, b in sig]
    else:
        out.append("significant: none")
    if dropped:
        out.append(f"skipped datasets with failed cells: {', '.join(dropped)}")
    return "\n".join(out)


def cmd_stats(args) -> int:
    rows = bench.read_results(args.results)
    print(stats_report(rows, args.metric, args.alpha, args.noise, args.format))
    return 0


def cmd_noise(args) -> int:
    data = load_csv(args.dataset, args.label_column, args.delimiter, args.header)
    noisy = add_noise(data, NoiseSpec(args.noise, args.seed))
    write_csv(noisy, args.output, args.label_column, args.delimiter, args.header)
    return 0


COMMANDS = {"cluster": cmd_cluster, "bench": cmd_bench, "stats": cmd_stats, "noise": cmd_noise}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, ArithmeticError, EmptyClusterError, np.linalg.LinAlgError) as exc:
        print(f"cwfcm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
