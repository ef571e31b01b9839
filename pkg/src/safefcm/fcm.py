"""Unsupervised and plain semi-supervised baselines: K-Means, FCM, SSFCM."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .data import one_hot_labels
from .neighbors import pairwise_distances
from .simplex import column_quadratic_min


@dataclass
class FitTrace:
    """Objective trajectory of one alternating-optimization fit."""

    objective: list = field(default_factory=list)  # J after each iteration
    initial_objective: float = np.nan
    n_iter: int = 0
    converged: bool = False
    mean_safety: list = field(default_factory=list)
    gate: list = field(default_factory=list)

    def max_increase(self):
        """Largest objective rise between consecutive iterations (0 if none)."""
        seq = [self.initial_objective] + self.objective
        diffs = np.diff(seq)
        return float(max(0.0, diffs.max())) if len(diffs) else 0.0


def squared_distances(x, centers):
    """(c, n) squared Euclidean distances from cluster centers to points."""
    return pairwise_distances(centers, x) ** 2


def fcm_objective(u, centers, x, m=2.0):
    """Weighted within-cluster scatter sum_i sum_k u_ik^m d_ik^2."""
    d2 = squared_distances(x, centers)
    return float((u**m * d2).sum())


def fcm_memberships(x, centers, m=2.0):
    """Membership matrix minimizing the scatter at fixed centers.

    Points coinciding with one or more centers split their unit membership
    uniformly over the zero-distance clusters (the limit case).
    """
    if m <= 1:
        raise ValueError("fuzziness must exceed 1")
    d2 = squared_distances(x, centers)
    zero = d2 <= 0.0
    singular = zero.any(axis=0)
    u = np.empty_like(d2)
    ok = ~singular
    if ok.any():
        inv = d2[:, ok] ** (-1.0 / (m - 1.0))
        u[:, ok] = inv / inv.sum(axis=0, keepdims=True)
    if singular.any():
        cols = np.flatnonzero(singular)
        u[:, cols] = zero[:, cols] / zero[:, cols].sum(axis=0)
    return u


def fcm_centers(x, u, m=2.0):
    """Membership-weighted means; every cluster needs positive mass."""
    w = u**m
    mass = w.sum(axis=1)
    if np.any(mass <= 0):
        raise ValueError("cluster with zero membership mass")
    return (w @ x) / mass[:, None]


def ssfcm_fidelity(u, labels_onehot, labeled_mask, centers, x, m=2.0):
    """Label-fidelity penalty sum_k sum_i (u_ik - f_ik b_k)^m d_ik^2."""
    d2 = squared_distances(x, centers)
    fb = labels_onehot * labeled_mask[None, :]
    return float((((u - fb) ** m) * d2).sum())


def kmeans_plusplus(x, c, rng):
    """k-means++ seeding: D^2-weighted draws after a uniform first center."""
    n = x.shape[0]
    centers = np.empty((c, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for i in range(1, c):
        total = closest.sum()
        if total <= 0:
            centers[i] = x[rng.integers(n)]
        else:
            centers[i] = x[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, ((x - centers[i]) ** 2).sum(axis=1))
    return centers


class KMeans(BaseEstimator):
    """Lloyd iterations with k-means++ seeding.

    Empty clusters are repaired by reseeding on the point farthest from its
    assigned center. Deterministic for a fixed ``random_state``.
    """

    def __init__(self, n_clusters=2, max_iter=300, tol=1e-8, random_state=0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        x = np.asarray(X, dtype=float)
        n, c = x.shape[0], self.n_clusters
        if c < 2 or n < c:
            raise ValueError("need n >= n_clusters >= 2")
        rng = np.random.default_rng(self.random_state)
        centers = kmeans_plusplus(x, c, rng)
        prev_inertia = np.inf
        for it in range(self.max_iter):
            d2 = squared_distances(x, centers)
            assign = d2.argmin(axis=0)
            closest = d2[assign, np.arange(n)]
            for i in range(c):
                mask = assign == i
                if mask.any():
                    centers[i] = x[mask].mean(axis=0)
                else:
                    far = closest.argmax()
                    centers[i] = x[far]
                    assign[far] = i
                    closest[far] = 0.0
            inertia = float(closest.sum())
            if prev_inertia - inertia <= self.tol:
                break
            prev_inertia = inertia
        d2 = squared_distances(x, centers)
        self.labels_ = d2.argmin(axis=0) + 1
        self.cluster_centers_ = centers
        self.inertia_ = float(d2.min(axis=0).sum())
        self.n_iter_ = it + 1
        return self

    def predict(self, X):
        d2 = squared_distances(np.asarray(X, dtype=float), self.cluster_centers_)
        return d2.argmin(axis=0) + 1


class FCM(BaseEstimator):
    """Fuzzy c-means by alternating membership and center updates.

    Stops when the objective changes by less than ``tol`` between iterations.
    Fitted attributes: ``membership_`` (clusters x samples, columns sum to 1),
    ``cluster_centers_``, ``labels_`` (argmax decode, ids 1..c), ``trace_``.
    """

    def __init__(self, n_clusters=2, m=2.0, tol=1e-4, max_iter=100, random_state=0):
        self.n_clusters = n_clusters
        self.m = m
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _init_centers(self, x):
        rng = np.random.default_rng(self.random_state)
        return kmeans_plusplus(x, self.n_clusters, rng)

    def fit(self, X, y=None):
        x = np.asarray(X, dtype=float)
        centers = self._init_centers(x)
        u = fcm_memberships(x, centers, self.m)
        trace = FitTrace(initial_objective=fcm_objective(u, centers, x, self.m))
        prev = trace.initial_objective
        for it in range(self.max_iter):
            u = fcm_memberships(x, centers, self.m)
            centers = fcm_centers(x, u, self.m)
            obj = fcm_objective(u, centers, x, self.m)
            trace.objective.append(obj)
            if abs(prev - obj) < self.tol:
                trace.converged = True
                prev = obj
                break
            prev = obj
        trace.n_iter = len(trace.objective)
        self.membership_ = u
        self.cluster_centers_ = centers
        self.labels_ = u.argmax(axis=0) + 1
        self.trace_ = trace
        self.n_iter_ = trace.n_iter
        return self

    def predict(self, X):
        u = fcm_memberships(np.asarray(X, dtype=float), self.cluster_centers_, self.m)
        return u.argmax(axis=0) + 1


def class_mean_centers(x, y, num_classes):
    """Per-class means of the labeled rows; cluster i starts at class i."""
    centers = np.empty((num_classes, x.shape[1]))
    for cls in range(1, num_classes + 1):
        mask = y == cls
        if not mask.any():
            raise ValueError(f"class {cls} has no labeled instance")
        centers[cls - 1] = x[mask].mean(axis=0)
    return centers


class SSFCM(BaseEstimator):
    """Semi-supervised FCM: scatter plus an alpha-weighted label-fidelity term.

    ``fit(X, y)`` takes class ids 1..c for labeled rows and -1 elsewhere.
    Updates are the closed-form alternating minimizers of the quadratic
    (m = 2) objective. ``init='class-means'`` starts cluster i on the mean
    of class-i labeled rows (so cluster ids align with classes);
    ``init='k-means++'`` reproduces the unsupervised seeding.
    """

    def __init__(self, n_clusters=2, alpha=1.0, tol=1e-4, max_iter=100,
                 init="class-means", random_state=0):
        self.n_clusters = n_clusters
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter
        self.init = init
        self.random_state = random_state

    def _objective(self, u, centers, x, f, b):
        d2 = squared_distances(x, centers)
        fb = f * b[None, :]
        return float((u**2 * d2).sum() + self.alpha * (((u - fb) ** 2) * d2).sum())

    def fit(self, X, y):
        x = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        c = self.n_clusters
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        labeled = y > 0
        f = np.zeros((c, x.shape[0]))
        f[:, labeled] = one_hot_labels(y[labeled], c)
        b = labeled.astype(float)
        if self.init == "class-means":
            centers = class_mean_centers(x[labeled], y[labeled], c)
        elif self.init == "k-means++":
            centers = kmeans_plusplus(x, c, np.random.default_rng(self.random_state))
        else:
            raise ValueError(f"unknown init: {self.init}")
        u = fcm_memberships(x, centers)
        trace = FitTrace(initial_objective=self._objective(u, centers, x, f, b))
        prev = trace.initial_objective
        for it in range(self.max_iter):
            d2 = squared_distances(x, centers)
            q = (1.0 + self.alpha * b[None, :]) * d2
            p = self.alpha * f * b[None, :] * d2
            u = column_quadratic_min(p, q)
            w = u**2 + self.alpha * b[None, :] * (u - f * b[None, :]) ** 2
            centers = (w @ x) / w.sum(axis=1)[:, None]
            obj = self._objective(u, centers, x, f, b)
            trace.objective.append(obj)
            if abs(prev - obj) < self.tol:
                trace.converged = True
                prev = obj
                break
            prev = obj
        trace.n_iter = len(trace.objective)
        self.membership_ = u
        self.cluster_centers_ = centers
        self.labels_ = u.argmax(axis=0) + 1
        self.trace_ = trace
        self.n_iter_ = trace.n_iter
        return self

    def predict(self, X):
        u = fcm_memberships(np.asarray(X, dtype=float), self.cluster_centers_)
        return u.argmax(axis=0) + 1
