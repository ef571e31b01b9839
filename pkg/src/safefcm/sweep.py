"""Deterministic experiment sweeps: dataset x ratio x lambda grid x repeats."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import data as datamod
from .config import ExperimentConfig, run_seed
from .fcm import FCM, KMeans, SSFCM
from .metrics import clustering_accuracy, predict_labels
from .safe import AS3FCM, KGBS3FCM

RUN_KEY_FIELDS = ("dataset", "algorithm", "ratio", "lambda1", "lambda2", "repeat")


def prepared_dataset(cfg):
    ds = datamod.load_dataset(cfg.dataset, directory=cfg.data_dir, seed=cfg.base_seed)
    return datamod.standardize(ds) if cfg.standardize else ds


def _make_estimator(cfg, lam1, lam2, num_classes, fit_seed):
    sp = cfg.safe
    if cfg.algorithm == "kmeans":
        return KMeans(n_clusters=num_classes, random_state=fit_seed)
    if cfg.algorithm == "fcm":
        return FCM(n_clusters=num_classes, tol=sp.tol, max_iter=sp.max_iter,
                   random_state=fit_seed)
    if cfg.algorithm == "ssfcm":
        return SSFCM(n_clusters=num_classes, alpha=lam1, tol=sp.tol,
                     max_iter=sp.max_iter)
    if cfg.algorithm == "as3fcm":
        return AS3FCM(lambda1=lam1, lambda2=lam2, n_neighbors=5, tol=sp.tol,
                      max_iter=sp.max_iter)
    if cfg.algorithm == "kgbs3fcm":
        return KGBS3FCM(lambda1=lam1, lambda2=lam2, density_k=sp.density_k,
                        safety_threshold=sp.safety_threshold, un_min=sp.un_min,
                        un_max=sp.un_max, tol=sp.tol, max_iter=sp.max_iter)
    raise ValueError(f"unknown algorithm: {cfg.algorithm}")


def execute_run(ds, cfg, ratio, lam1, lam2, repeat):
    """One protocol run: fresh seeded split, corruption, fit, score."""
    seed = run_seed(cfg.base_seed, cfg.dataset, ratio, lam1, lam2, repeat)
    split_seed, noise_seed, fit_seed = np.random.SeedSequence(seed).generate_state(3)
    record = {
        "dataset": cfg.dataset, "algorithm": cfg.algorithm, "ratio": ratio,
        "lambda1": lam1, "lambda2": lam2, "repeat": repeat, "seed": int(seed),
    }
    start = time.perf_counter()
    try:
        view = datamod.split_labeled(ds, cfg.labeled_fraction, int(split_seed))
        view = datamod.inject_mislabels(view, ratio, int(noise_seed))
        est = _make_estimator(cfg, lam1, lam2, ds.num_classes, int(fit_seed))
        if cfg.algorithm in ("kmeans", "fcm"):
            est.fit(view.features)
            match = "best_permutation"
        else:
            est.fit(view.features, view.semi_supervised_targets())
            match = "identity"
        pred = (est.labels_ if cfg.algorithm == "kmeans"
                else predict_labels(est.membership_))
        score = clustering_accuracy(pred, view.ground_truth, match=match)
        record["accuracy"] = score.accuracy
        if hasattr(est, "trace_"):
            record["n_iter"] = est.trace_.n_iter
            record["converged"] = bool(est.trace_.converged)
            record["objective"] = est.trace_.objective[-1] if est.trace_.objective else None
            record["objective_increase"] = est.trace_.max_increase()
        if hasattr(est, "mean_safety_"):
            record["mean_safety"] = est.mean_safety_
            record["gate"] = est.gate_
    except Exception as exc:  # per-run failures are recorded, not fatal
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["elapsed_s"] = time.perf_counter() - start
    return record


def run_key(record):
    return tuple(record.get(k) for k in RUN_KEY_FIELDS)


def load_records(path):
    """Read a JSONL result stream, tolerating a truncated final line."""
    records = []
    if not os.path.exists(path):
        return records
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                continue
    return records


def plan_tasks(cfg):
    return [(ratio, lam1, lam2, rep)
            for ratio in cfg.mislabel_ratios
            for (lam1, lam2) in cfg.grid()
            for rep in range(cfg.repeats)]


_WORKER_STATE = {}


def _worker_init(cfg_dict):
    cfg = ExperimentConfig.from_dict(cfg_dict)
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["ds"] = prepared_dataset(cfg)


def _worker_run(task):
    return execute_run(_WORKER_STATE["ds"], _WORKER_STATE["cfg"], *task)


def run_sweep(cfg, out_path=None, workers=1, progress=None):
    """Execute every run of the protocol, appending one JSON object per line.

    A crashed sweep resumes from its output file without recomputing
    completed runs. Records are returned (and written) deterministically
    given the config's base_seed, regardless of worker scheduling.
    """
    cfg.validate()
    done = {}
    if out_path:
        for rec in load_records(out_path):
            done[run_key(rec)] = rec
    tasks = plan_tasks(cfg)
    pending = [t for t in tasks
               if (cfg.dataset, cfg.algorithm, t[0], t[1], t[2], t[3]) not in done]
    out_fh = open(out_path, "a", encoding="utf-8") if out_path else None
    new_records = []
    try:
        if workers > 1 and pending:
            with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                                     initargs=(cfg.to_dict(),)) as pool:
                for rec in pool.map(_worker_run, pending, chunksize=4):
                    new_records.append(rec)
                    if out_fh:
                        out_fh.write(json.dumps(rec, sort_keys=True) + "\n")
                        out_fh.flush()
                    if progress:
                        progress(rec)
        elif pending:
            ds = prepared_dataset(cfg)
            for task in pending:
                rec = execute_run(ds, cfg, *task)
                new_records.append(rec)
                if out_fh:
                    out_fh.write(json.dumps(rec, sort_keys=True) + "\n")
                    out_fh.flush()
                if progress:
                    progress(rec)
    finally:
        if out_fh:
            out_fh.close()
    for rec in new_records:
        done[run_key(rec)] = rec
    ordered = [done[(cfg.dataset, cfg.algorithm, t[0], t[1], t[2], t[3])]
               for t in tasks]
    return ordered
