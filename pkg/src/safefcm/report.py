"""Aggregation, comparison against published numbers, and plot-data export."""

from __future__ import annotations

import csv
import logging
import os
from collections import defaultdict

from .config import ALGORITHMS
from .metrics import aggregate
from .reference import reported_accuracy

log = logging.getLogger(__name__)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # full precision; parses back to the same double
    return str(v)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def good_records(records):
    return [r for r in records if "accuracy" in r and "error" not in r]


def _agg_sort_key(key):
    dataset, algorithm, ratio, lam1, lam2 = key
    return (dataset, algorithm, ratio,
            -1.0 if lam1 is None else lam1, -1.0 if lam2 is None else lam2)


def aggregate_table(records):
    """Mean/std accuracy per (dataset, algorithm, ratio, lambda1, lambda2)."""
    groups = defaultdict(list)
    for r in good_records(records):
        groups[(r["dataset"], r["algorithm"], r["ratio"],
                r["lambda1"], r["lambda2"])].append(r["accuracy"])
    rows = []
    for key in sorted(groups, key=_agg_sort_key):
        agg = aggregate(groups[key])
        rows.append({"dataset": key[0], "algorithm": key[1], "ratio": key[2],
                     "lambda1": key[3], "lambda2": key[4],
                     "mean": agg.mean, "std": agg.std, "runs": agg.runs})
    return rows


def select_best_lambda(records):
    """Best hyperparameter cell per (dataset, algorithm, ratio) by mean
    accuracy; ties break on the smaller lambda values."""
    best = {}
    for row in aggregate_table(records):
        key = (row["dataset"], row["algorithm"], row["ratio"])
        cur = best.get(key)
        if cur is None or row["mean"] > cur["mean"]:
            best[key] = row
    return [best[k] for k in sorted(best)]


def comparison_table(records, tolerance=3.0):
    """Reproduced best-lambda accuracies against the published cells.

    Deltas are in accuracy points (percent); cells more than ``tolerance``
    points away are flagged.
    """
    rows = []
    for row in select_best_lambda(records):
        if row["algorithm"] != "kgbs3fcm":
            continue
        ref = reported_accuracy(row["dataset"], row["ratio"])
        if ref is None:
            continue
        got = 100.0 * row["mean"]
        delta = got - ref
        rows.append({"dataset": row["dataset"], "ratio": row["ratio"],
                     "lambda1": row["lambda1"], "lambda2": row["lambda2"],
                     "reproduced": got, "reported": ref, "delta": delta,
                     "within_tolerance": abs(delta) <= tolerance})
    return rows


def export_aggregates(records, path):
    rows = aggregate_table(records)
    write_csv(path, ["dataset", "algorithm", "ratio", "lambda1", "lambda2",
                     "mean", "std", "runs"],
              [[r[k] for k in ("dataset", "algorithm", "ratio", "lambda1",
                               "lambda2", "mean", "std", "runs")] for r in rows])
    return rows


def export_best_lambda(records, path):
    rows = select_best_lambda(records)
    write_csv(path, ["dataset", "algorithm", "ratio", "lambda1", "lambda2",
                     "mean", "std", "runs"],
              [[r[k] for k in ("dataset", "algorithm", "ratio", "lambda1",
                               "lambda2", "mean", "std", "runs")] for r in rows])
    return rows


def export_comparison(records, path, tolerance=3.0):
    rows = comparison_table(records, tolerance=tolerance)
    write_csv(path, ["dataset", "ratio", "lambda1", "lambda2", "reproduced",
                     "reported", "delta", "within_tolerance"],
              [[r[k] for k in ("dataset", "ratio", "lambda1", "lambda2",
                               "reproduced", "reported", "delta",
                               "within_tolerance")] for r in rows])
    return rows


def export_plot_data(records, outdir):
    """One CSV per dataset: mislabel ratio against best mean/std per algorithm."""
    os.makedirs(outdir, exist_ok=True)
    best = select_best_lambda(records)
    datasets = sorted({r["dataset"] for r in best})
    paths = []
    for ds in datasets:
        algos = [a for a in ALGORITHMS
                 if any(r["algorithm"] == a and r["dataset"] == ds for r in best)]
        for a in ALGORITHMS:
            if a not in algos:
                log.warning("plot export %s: no results for %s; column omitted", ds, a)
        ratios = sorted({r["ratio"] for r in best if r["dataset"] == ds})
        cell = {(r["algorithm"], r["ratio"]): r for r in best if r["dataset"] == ds}
        header = ["ratio"]
        for a in algos:
            header += [f"{a}_mean", f"{a}_std"]
        rows = []
        for ratio in ratios:
            row = [ratio]
            for a in algos:
                r = cell.get((a, ratio))
                row += [r["mean"] if r else None, r["std"] if r else None]
            rows.append(row)
        path = os.path.join(outdir, f"{ds}_accuracy.csv")
        write_csv(path, header, rows)
        paths.append(path)
    return paths


def read_back_csv(path):
    """Parse a CSV written by write_csv; floats round-trip exactly."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = []
            for v in raw:
                if v == "":
                    row.append(None)
                    continue
                try:
                    row.append(int(v))
                except ValueError:
                    try:
                        row.append(float(v))
                    except ValueError:
                        row.append(v)
            rows.append(row)
    return header, rows
