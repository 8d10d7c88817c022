"""Command-line interface: toy data generation, fit/score, score grids for
contour plotting, and the benchmark runner.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every command is deterministic given its flags; randomness enters only
through the documented seed flags.  The one exception is the wall-clock
``seconds`` column of the benchmark table, which measures real time.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .datasets import LABEL_COLUMN, TOY_KINDS, generate_toy, load_csv, save_csv
from .errors import DataError, NumericalError
from .evaluate import (
    DETECTOR_KINDS,
    KRPD,
    KRPD_RFF,
    BenchmarkCell,
    fit_detector,
    percentile_threshold,
    run_benchmark,
)

_FLOAT_FMT = "{:.17g}"

_BENCHMARK_COLUMNS = ("dataset", "detector", "auc_mean", "auc_std", "gamma", "M", "L", "seconds")
_ABLATION_COLUMNS = ("dataset", "w/o KPCA (RFF)", "w/ KPCA")

# Benchmark flags that a --config JSON file may supply; explicit flags win.
_CONFIG_KEYS = {
    "data_dir": str,
    "out": str,
    "ablation_out": str,
    "detectors": list,
    "trials": int,
    "budget": int,
    "directions": int,
    "seed": int,
    "train_fraction": float,
    "folds": int,
}


class UsageError(Exception):
    """Bad flags or flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="projdepth", description="Projection-depth outlier detection toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic toy cloud as CSV")
    gen.add_argument("--kind", required=True, choices=TOY_KINDS, help="toy cloud family")
    gen.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.set_defaults(handler=_cmd_generate)

    fit = sub.add_parser("fit-score", help="fit a detector on a train CSV and score a query CSV")
    _add_detector_flags(fit)
    fit.add_argument("--train", required=True, help="training CSV")
    fit.add_argument("--queries", required=True, help="query CSV to score")
    fit.add_argument("--out", required=True, help="output scores CSV (columns: score[,label])")
    fit.set_defaults(handler=_cmd_fit_score)

    grid = sub.add_parser("grid", help="score a uniform 2-D grid for contour plotting")
    _add_detector_flags(grid)
    grid.add_argument("--train", required=True, help="training CSV (must be 2-dimensional)")
    grid.add_argument("--out", required=True, help="output CSV (columns x,y,score plus threshold footer)")
    grid.add_argument(
        "--bounds",
        type=float,
        nargs=4,
        default=(-6.0, 6.0, -6.0, 6.0),
        metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
        help="grid bounds (default -6 6 -6 6)",
    )
    grid.add_argument("--resolution", type=int, default=200, help="grid points per axis (default 200)")
    grid.add_argument(
        "--contamination",
        type=float,
        default=0.25,
        help="assumed outlier fraction for the threshold footer (default 0.25)",
    )
    grid.set_defaults(handler=_cmd_grid)

    bench = sub.add_parser("benchmark", help="run the ROC-AUC benchmark over a directory of labeled CSVs")
    # required in effect, but a --config file may supply them
    bench.add_argument("--data-dir", default=None, help="directory scanned for labeled *.csv datasets")
    bench.add_argument("--out", default=None, help="output table CSV")
    bench.add_argument(
        "--detectors",
        nargs="+",
        choices=DETECTOR_KINDS,
        default=list(DETECTOR_KINDS),
        help="detectors to run (default: all)",
    )
    bench.add_argument("--trials", type=int, default=5, help="independent trials per cell (default 5)")
    bench.add_argument("--budget", type=int, default=25, help="random-search trials (default 25)")
    bench.add_argument("--directions", type=int, default=1000, help="projection directions L (default 1000)")
    bench.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    bench.add_argument("--train-fraction", type=float, default=0.6, help="train split fraction (default 0.6)")
    bench.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    bench.add_argument(
        "--ablation-out",
        default=None,
        help="ablation table path (default: <out>.ablation.csv when krpd and krpd-rff both run)",
    )
    bench.add_argument("--config", default=None, help="JSON file supplying flag defaults (flags win)")
    bench.set_defaults(handler=_cmd_benchmark)
    return parser


def _add_detector_flags(parser) -> None:
    parser.add_argument("--detector", choices=DETECTOR_KINDS, default="krpd", help="detector kind (default krpd)")
    parser.add_argument("--gamma", type=float, default=0.25, help="RBF bandwidth (default 0.25)")
    parser.add_argument(
        "--components",
        type=int,
        default=100,
        help="embedding size: KPCA components, or feature count for krpd-rff (default 100)",
    )
    parser.add_argument("--neighbors", type=int, default=5, help="k for the knn detector (default 5)")
    parser.add_argument("--directions", type=int, default=1000, help="projection directions L (default 1000)")
    parser.add_argument("--direction-seed", type=int, default=0, help="seed for detector randomness (default 0)")


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


def entrypoint() -> None:
    raise SystemExit(main())


def _apply_config(argv) -> list:
    """Expand a --config JSON file into flags injected right after the
    subcommand, so flags the user typed still win (last occurrence counts)."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config expects a path")
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return argv
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise DataError(f"{path}: config must be a JSON object")
    injected = []
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}; expected one of {sorted(_CONFIG_KEYS)}")
        flag = "--" + key.replace("_", "-")
        if _CONFIG_KEYS[key] is list:
            if not isinstance(value, list):
                raise UsageError(f"config key {key!r} must be a list")
            injected.extend([flag, *[str(v) for v in value]])
        else:
            injected.extend([flag, str(value)])
    return argv[:1] + injected + argv[1:]


def _load_cloud(path):
    """Load a CSV, using its ``label`` column when the header has one."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        try:
            header = [name.strip() for name in next(csv.reader(handle))]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
    return load_csv(path, LABEL_COLUMN if LABEL_COLUMN in header else None)


def _detector_params(args) -> dict:
    return {
        "gamma": args.gamma,
        "n_components": args.components,
        "n_features": args.components,
        "n_neighbors": args.neighbors,
    }


def _fit_with_notes(args, train):
    """Fit the selected detector, turning warnings into deterministic stderr
    notes so repeated runs emit identical streams."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        detector = fit_detector(args.detector, train, _detector_params(args), args.directions, args.direction_seed)
    for item in caught:
        print(f"note: {item.message}", file=sys.stderr)
    return detector


def _cmd_generate(args) -> int:
    cloud = generate_toy(args.kind, args.seed)
    save_csv(cloud, args.out)
    print(f"wrote {args.out}: {cloud.n_samples} samples, {cloud.n_dims} dims")
    return 0


def _cmd_fit_score(args) -> int:
    train = _load_cloud(args.train)
    queries = _load_cloud(args.queries)
    detector = _fit_with_notes(args, train)
    scores = detector.score(queries.features)
    with Path(args.out).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if queries.labels is not None:
            writer.writerow(["score", LABEL_COLUMN])
            for value, label in zip(scores, queries.labels):
                writer.writerow([_FLOAT_FMT.format(value), str(int(label))])
        else:
            writer.writerow(["score"])
            for value in scores:
                writer.writerow([_FLOAT_FMT.format(value)])
    print(f"wrote {args.out}: {scores.size} scores from {args.detector}")
    return 0


def _cmd_grid(args) -> int:
    xmin, xmax, ymin, ymax = args.bounds
    if not (xmin < xmax and ymin < ymax):
        raise UsageError(f"bounds must satisfy xmin < xmax and ymin < ymax, got {args.bounds}")
    if args.resolution < 2:
        raise UsageError(f"resolution must be at least 2, got {args.resolution}")
    train = _load_cloud(args.train)
    if train.n_dims != 2:
        raise DataError(f"grid mode requires 2-dimensional training data, got d={train.n_dims}")
    detector = _fit_with_notes(args, train)
    train_scores = detector.score(train.features)
    threshold = percentile_threshold(train_scores, args.contamination)
    xs = np.linspace(xmin, xmax, args.resolution)
    ys = np.linspace(ymin, ymax, args.resolution)
    grid_x, grid_y = np.meshgrid(xs, ys)
    points = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    scores = detector.score(points)
    with Path(args.out).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x", "y", "score"])
        for (x, y), value in zip(points, scores):
            writer.writerow([_FLOAT_FMT.format(x), _FLOAT_FMT.format(y), _FLOAT_FMT.format(value)])
        handle.write(f"# threshold,{_FLOAT_FMT.format(threshold)}\n")
    print(f"wrote {args.out}: {scores.size} grid scores, threshold {threshold:.6g}")
    return 0


def _cmd_benchmark(args) -> int:
    if args.data_dir is None or args.out is None:
        raise UsageError("benchmark requires --data-dir and --out (flags or config file)")
    data_dir = Path(args.data_dir)
    if not data_dir.is_dir():
        raise DataError(f"{data_dir}: not a directory")
    paths = []
    for path in sorted(data_dir.glob("*.csv")):
        with path.open(newline="", encoding="utf-8") as handle:
            header = next(csv.reader(handle), [])
        if LABEL_COLUMN in [name.strip() for name in header]:
            paths.append(path)
    if not paths:
        raise DataError(f"{data_dir}: no labeled CSV datasets found")
    cells = run_benchmark(
        paths,
        args.detectors,
        trials=args.trials,
        seed=args.seed,
        budget=args.budget,
        n_directions=args.directions,
        train_fraction=args.train_fraction,
        n_folds=args.folds,
    )
    _write_benchmark_csv(cells, args.out)
    for line in _format_table(cells):
        print(line)
    for cell in cells:
        if cell.error:
            print(f"cell {cell.dataset}/{cell.detector} failed: {cell.error}", file=sys.stderr)
    print(f"wrote {args.out}")
    if KRPD in args.detectors and KRPD_RFF in args.detectors:
        ablation_path = args.ablation_out or f"{args.out}.ablation.csv"
        _write_ablation_csv(cells, ablation_path)
        print(f"wrote {ablation_path}")
    return 0


def _cell_row(cell: BenchmarkCell) -> list[str]:
    params = cell.params or {}
    if cell.report is None:
        auc_mean, auc_std = "nan", "nan"
    else:
        auc_mean = f"{cell.report.auc_mean:.6f}"
        auc_std = f"{cell.report.auc_std:.6f}"
    gamma = f"{params['gamma']:.6g}" if "gamma" in params else ""
    size = params.get("n_components", params.get("n_features", params.get("n_neighbors")))
    uses_directions = cell.detector in ("rpd", "krpd", "krpd-rff")
    return [
        cell.dataset,
        cell.detector,
        auc_mean,
        auc_std,
        gamma,
        "" if size is None else str(size),
        str(cell.n_directions) if uses_directions else "",
        f"{cell.seconds:.3f}",
    ]


def _write_benchmark_csv(cells, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_BENCHMARK_COLUMNS)
        for cell in cells:
            writer.writerow(_cell_row(cell))


def _write_ablation_csv(cells, path) -> None:
    """Two-column comparison of the kernel scorer with and without the
    principal component step."""
    by_key = {(c.dataset, c.detector): c for c in cells}
    datasets = sorted({c.dataset for c in cells})
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_ABLATION_COLUMNS)
        for name in datasets:
            row = [name]
            for kind in (KRPD_RFF, KRPD):
                cell = by_key.get((name, kind))
                if cell is None or cell.report is None:
                    row.append("")
                else:
                    row.append(f"{cell.report.auc_mean:.3f}±{cell.report.auc_std:.3f}")
            writer.writerow(row)


def _format_table(cells) -> list[str]:
    rows = [list(_BENCHMARK_COLUMNS)] + [_cell_row(cell) for cell in cells]
    widths = [max(len(row[i]) for row in rows) for i in range(len(_BENCHMARK_COLUMNS))]
    return ["  ".join(value.ljust(widths[i]) for i, value in enumerate(row)).rstrip() for row in rows]
