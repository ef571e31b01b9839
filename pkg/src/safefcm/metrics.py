"""Clustering-accuracy scoring and per-configuration aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

MAX_PERMUTATION_CLASSES = 8


@dataclass
class RunScore:
    accuracy: float
    per_class_hits: np.ndarray  # hits per true class, length c
    mapping_used: tuple  # cluster id i (1-based position) -> class mapping_used[i-1]


@dataclass
class AggregateScore:
    mean: float
    std: float
    runs: int


def predict_labels(u):
    """Hard labels (ids 1..c) from a membership matrix; ties take the
    smallest cluster index."""
    u = np.asarray(u, dtype=float)
    return u.argmax(axis=0) + 1


def clustering_accuracy(pred, truth, match="identity"):
    """Fraction of all points whose decoded cluster matches the true class.

    ``identity`` assumes clusters are already aligned to classes (the
    semi-supervised fits anchor cluster i to class i). ``best_permutation``
    maximizes accuracy over all cluster-to-class bijections, for the
    unsupervised baselines whose cluster ids are arbitrary.
    """
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth must have equal length")
    n = len(truth)
    c = int(max(pred.max(), truth.max()))
    if match == "identity":
        mapping = tuple(range(1, c + 1))
        relabeled = pred
    elif match == "best_permutation":
        if c > MAX_PERMUTATION_CLASSES:
            raise ValueError(f"permutation matching supports at most "
                             f"{MAX_PERMUTATION_CLASSES} classes (got {c})")
        # contingency[i, j]: points in cluster i+1 with true class j+1
        contingency = np.zeros((c, c), dtype=int)
        np.add.at(contingency, (pred - 1, truth - 1), 1)
        best_hits, mapping = -1, None
        for perm in permutations(range(c)):
            hits = contingency[np.arange(c), perm].sum()
            if hits > best_hits:
                best_hits, mapping = hits, perm
        mapping = tuple(p + 1 for p in mapping)
        relabeled = np.asarray(mapping)[pred - 1]
    else:
        raise ValueError(f"unknown match mode: {match}")
    correct = relabeled == truth
    per_class = np.array([int(correct[truth == cls].sum()) for cls in range(1, c + 1)])
    return RunScore(accuracy=float(correct.sum()) / n,
                    per_class_hits=per_class,
                    mapping_used=mapping)


def aggregate(scores):
    """Mean and sample standard deviation of run accuracies."""
    if not len(scores):
        raise ValueError("no scores to aggregate")
    acc = np.array([s.accuracy if isinstance(s, RunScore) else float(s) for s in scores])
    std = float(acc.std(ddof=1)) if len(acc) > 1 else 0.0
    return AggregateScore(mean=float(acc.mean()), std=std, runs=len(acc))
