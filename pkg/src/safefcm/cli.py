"""Command-line interface: gen-data, run, sweep, report, oracle."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import data as datamod
from . import report as reportmod
from .config import ExperimentConfig, SafeParams
from .sweep import execute_run, load_records, plan_tasks, prepared_dataset, run_sweep


def _cfg_from_args(args):
    if getattr(args, "config", None):
        cfg = ExperimentConfig.from_yaml(args.config)
    else:
        cfg = ExperimentConfig()
    for name in ("dataset", "algorithm", "repeats", "base_seed", "data_dir"):
        val = getattr(args, name.replace("-", "_"), None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


def cmd_gen_data(args):
    if args.name in ("gauss50", "gauss50x"):
        ds = datamod.gen_gauss(args.name, args.seed)
    elif args.name == "waveform":
        ds = datamod.gen_waveform(args.seed)
    else:
        raise SystemExit(f"no generator for dataset '{args.name}'")
    out = args.out or os.path.join(datamod.data_dir(args.data_dir), f"{args.name}.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    datamod.export_csv(ds, out)
    print(f"wrote {ds.n} x {ds.dim} ({ds.num_classes} classes) to {out}")
    return 0


def cmd_run(args):
    cfg = _cfg_from_args(args)
    ds = prepared_dataset(cfg)
    rec = execute_run(ds, cfg, args.ratio, args.lambda1, args.lambda2, args.repeat)
    print(json.dumps(rec, sort_keys=True, indent=2))
    return 0 if "error" not in rec else 1


def cmd_sweep(args):
    cfg = _cfg_from_args(args)
    out = args.out or f"results/{cfg.dataset}_{cfg.algorithm}.jsonl"
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    total = len(plan_tasks(cfg))
    state = {"done": 0}

    def progress(rec):
        state["done"] += 1
        if state["done"] % args.log_every == 0:
            acc = rec.get("accuracy")
            print(f"[{state['done']}/{total}] ratio={rec['ratio']} "
                  f"l1={rec['lambda1']} l2={rec['lambda2']} "
                  f"acc={'n/a' if acc is None else f'{acc:.4f}'}", flush=True)

    records = run_sweep(cfg, out_path=out, workers=args.workers, progress=progress)
    errors = [r for r in records if "error" in r]
    print(f"sweep complete: {len(records)} runs, {len(errors)} errors -> {out}")
    return 0


def cmd_report(args):
    records = []
    for path in args.results:
        records.extend(load_records(path))
    if not records:
        raise SystemExit("no records found")
    os.makedirs(args.outdir, exist_ok=True)
    reportmod.export_aggregates(records, os.path.join(args.outdir, "aggregates.csv"))
    reportmod.export_best_lambda(records, os.path.join(args.outdir, "best_lambda.csv"))
    comparison = reportmod.export_comparison(
        records, os.path.join(args.outdir, "comparison.csv"), tolerance=args.tolerance)
    reportmod.export_plot_data(records, os.path.join(args.outdir, "plots"))
    flagged = [c for c in comparison if not c["within_tolerance"]]
    for c in comparison:
        mark = "ok" if c["within_tolerance"] else "FLAG"
        print(f"{mark:4} {c['dataset']:12} ratio={c['ratio']:.2f} "
              f"reproduced={c['reproduced']:.1f} reported={c['reported']:.1f} "
              f"delta={c['delta']:+.1f}")
    print(f"report written to {args.outdir} ({len(flagged)} cells outside "
          f"+/-{args.tolerance} points)")
    if args.check and flagged:
        return 1
    return 0


def cmd_oracle(args):
    from .oracle_suite import run_oracle_suite

    results = run_oracle_suite(seed=args.seed)
    ok = True
    for name, entry in results.items():
        status = "PASS" if entry["pass"] else "FAIL"
        ok = ok and entry["pass"]
        print(f"{status} {name}: {entry['detail']}")
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
        print(f"oracle report -> {args.out}")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="safefcm",
        description="Safe semi-supervised fuzzy clustering benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic dataset CSV")
    p.add_argument("--name", required=True,
                   choices=["gauss50", "gauss50x", "waveform"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--data-dir", dest="data_dir")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("run", help="single fit under the protocol")
    p.add_argument("--config")
    p.add_argument("--dataset")
    p.add_argument("--algorithm")
    p.add_argument("--ratio", type=float, default=0.0)
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--repeat", type=int, default=0)
    p.add_argument("--base-seed", dest="base_seed", type=int)
    p.add_argument("--data-dir", dest="data_dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="full protocol sweep to a JSONL stream")
    p.add_argument("--config")
    p.add_argument("--dataset")
    p.add_argument("--algorithm")
    p.add_argument("--repeats", type=int)
    p.add_argument("--base-seed", dest="base_seed", type=int)
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--log-every", type=int, default=100)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="tables and plot CSVs from sweep results")
    p.add_argument("--results", nargs="+", required=True)
    p.add_argument("--outdir", default="report")
    p.add_argument("--tolerance", type=float, default=3.0)
    p.add_argument("--check", action="store_true",
                   help="exit nonzero if any comparison cell is out of tolerance")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("oracle", help="run the brute-force validation oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
