"""Labeled-to-unlabeled distances, KNN queries, and the weighted neighbor graph."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


def pairwise_distances(a, b):
    """Exact Euclidean distances between the rows of two matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("matrices must be 2-d with matching feature dimension")
    return cdist(a, b)


@dataclass
class DistanceIndex:
    """Distances from each labeled instance to every unlabeled instance.

    Rows are pre-sorted once; ties sort by smaller unlabeled index (stable).
    ``sigma`` is the mean of all labeled-to-unlabeled distances and feeds the
    graph's Gaussian weights.
    """

    dist: np.ndarray  # (l, n_u)
    order: np.ndarray  # (l, n_u) int, row-wise argsort of dist
    sorted_dist: np.ndarray  # (l, n_u)
    sigma: float

    @property
    def n_labeled(self):
        return self.dist.shape[0]

    @property
    def n_unlabeled(self):
        return self.dist.shape[1]


def build_distance_index(labeled, unlabeled):
    dist = pairwise_distances(labeled, unlabeled)
    sigma = float(dist.mean())
    if sigma == 0.0:
        raise ValueError("all points coincide; graph bandwidth is zero")
    order = np.argsort(dist, axis=1, kind="stable")
    sorted_dist = np.take_along_axis(dist, order, axis=1)
    return DistanceIndex(dist=dist, order=order, sorted_dist=sorted_dist, sigma=sigma)


def knn_unlabeled(k, labeled_index, index):
    """Indices of the k nearest unlabeled instances, ascending distance."""
    if not 1 <= k <= index.n_unlabeled:
        raise ValueError(f"k={k} out of range 1..{index.n_unlabeled}")
    return index.order[labeled_index, :k].copy()


def avg_knn_distance(k, labeled_index, index):
    """Mean distance to the k nearest unlabeled neighbors (density proxy)."""
    if not 1 <= k <= index.n_unlabeled:
        raise ValueError(f"k={k} out of range 1..{index.n_unlabeled}")
    return float(index.sorted_dist[labeled_index, :k].mean())


def density_proxies(k, index):
    """avg_knn_distance for every labeled instance, as one vector."""
    if not 1 <= k <= index.n_unlabeled:
        raise ValueError(f"k={k} out of range 1..{index.n_unlabeled}")
    return index.sorted_dist[:, :k].mean(axis=1)


def dynamic_pun(dbar, un_min, un_max):
    """Per-instance unlabeled-neighbor counts from the density proxies.

    Linear rescaling between min and max of the proxies, rounded half-up and
    clamped to [un_min, un_max]; sparse regions get more neighbors. A flat
    proxy vector maps everywhere to un_min.
    """
    if un_min > un_max:
        raise ValueError("un_min must not exceed un_max")
    dbar = np.asarray(dbar, dtype=float)
    lo, hi = dbar.min(), dbar.max()
    if hi == lo:
        return np.full(dbar.shape, un_min, dtype=int)
    scaled = un_min + (un_max - un_min) * (dbar - lo) / (hi - lo)
    return np.clip(np.floor(scaled + 0.5).astype(int), un_min, un_max)


@dataclass
class NeighborGraph:
    """Sparse labeled-to-unlabeled weight graph in flat COO-style arrays.

    Edge e connects labeled ``k_idx[e]`` to unlabeled ``r_idx[e]`` with weight
    exp(-d^2/sigma^2); absent pairs have weight 0. Edges are grouped by
    labeled instance: row k owns slice offsets[k]:offsets[k+1].
    """

    k_idx: np.ndarray  # (nnz,) labeled indices
    r_idx: np.ndarray  # (nnz,) unlabeled indices
    dist: np.ndarray  # (nnz,)
    weight: np.ndarray  # (nnz,)
    offsets: np.ndarray  # (l+1,)
    dpun: np.ndarray  # (l,)
    n_unlabeled: int
    sigma: float

    @property
    def n_labeled(self):
        return len(self.dpun)

    def neighbors(self, k):
        return self.r_idx[self.offsets[k] : self.offsets[k + 1]]

    def weights_of(self, k):
        return self.weight[self.offsets[k] : self.offsets[k + 1]]

    def row_sums(self):
        return np.add.reduceat(self.weight, self.offsets[:-1]) if len(self.weight) else np.zeros(self.n_labeled)

    def matrix(self):
        """Dense (l, n_u) weight matrix; fine at benchmark scale."""
        w = np.zeros((self.n_labeled, self.n_unlabeled))
        w[self.k_idx, self.r_idx] = self.weight
        return w


def graph_weights(index, dpun):
    """Gaussian-weighted edges from each labeled point to its dpun[k] nearest
    unlabeled neighbors."""
    dpun = np.asarray(dpun, dtype=int)
    l = index.n_labeled
    if dpun.shape != (l,):
        raise ValueError("dpun must have one entry per labeled instance")
    if dpun.min() < 1 or dpun.max() > index.n_unlabeled:
        raise ValueError("neighbor counts out of range")
    offsets = np.concatenate([[0], np.cumsum(dpun)])
    k_idx = np.repeat(np.arange(l), dpun)
    col = np.concatenate([np.arange(m) for m in dpun]) if l else np.empty(0, dtype=int)
    r_idx = index.order[k_idx, col]
    dist = index.dist[k_idx, r_idx]
    weight = np.exp(-(dist**2) / index.sigma**2)
    return NeighborGraph(
        k_idx=k_idx,
        r_idx=r_idx,
        dist=dist,
        weight=weight,
        offsets=offsets,
        dpun=dpun.copy(),
        n_unlabeled=index.n_unlabeled,
        sigma=index.sigma,
    )


def build_graph(labeled, unlabeled, density_k, un_min, un_max):
    """Distance index, density-driven neighbor counts, and the weight graph."""
    index = build_distance_index(labeled, unlabeled)
    k = min(density_k, index.n_unlabeled)
    hi = min(un_max, index.n_unlabeled)
    lo = min(un_min, hi)
    dpun = dynamic_pun(density_proxies(k, index), lo, hi)
    return index, graph_weights(index, dpun)


def dump_graph_csv(graph, path):
    """Debug dump: one (labeled, unlabeled, distance, weight) row per edge."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["labeled", "unlabeled", "distance", "weight"])
        for k, r, d, wt in zip(graph.k_idx, graph.r_idx, graph.dist, graph.weight):
            w.writerow([int(k), int(r), repr(float(d)), repr(float(wt))])
