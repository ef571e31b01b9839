"""Safety-aware semi-supervised fuzzy clustering.

Two estimators share the same quadratic membership machinery:

* ``KGBS3FCM`` scores each provided label by the local inconsistency with a
  density-sized set of unlabeled KNN neighbors, and amplifies the
  labeled-to-unlabeled coupling when the average safety degree clears a
  threshold.
* ``AS3FCM`` keeps a fixed-size neighborhood and instead estimates safety
  degrees on the probability simplex through a separable quadratic program.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import one_hot_labels
from .fcm import FitTrace, class_mean_centers, fcm_memberships, squared_distances
from .neighbors import build_distance_index, dynamic_pun, density_proxies, graph_weights
from .simplex import column_quadratic_min, minimize_diag_quadratic_on_simplex


@dataclass
class SafetyVector:
    """Per-labeled-instance confidence scores in (0, 1]; not normalized."""

    s: np.ndarray
    mean: float


@dataclass
class As3State:
    """Simplex-constrained safety degrees with their quadratic coefficients."""

    s: np.ndarray
    omega: np.ndarray
    delta: np.ndarray


def local_inconsistency(u_unlabeled, labels_onehot, graph):
    """Accumulated L1 disagreement between each provided label and the
    memberships of its unlabeled neighbors."""
    diff = np.abs(u_unlabeled[:, graph.r_idx] - labels_onehot[:, graph.k_idx]).sum(axis=0)
    return np.add.reduceat(diff, graph.offsets[:-1])


def safety_degrees(li, dpun):
    """Neighbor-averaged consistency score s = 1 / (1 + li/dpun)."""
    li = np.asarray(li, dtype=float)
    dpun = np.asarray(dpun, dtype=float)
    if np.any(dpun < 1):
        raise ValueError("neighbor counts must be at least 1")
    s = 1.0 / (1.0 + li / dpun)
    return SafetyVector(s=s, mean=float(s.mean()))


def step_gate(mean_s, threshold):
    """1 when the average safety degree reaches the threshold, else 0."""
    return 1 if mean_s >= threshold else 0


def _edge_squares(u_labeled, u_unlabeled, labels_onehot, graph):
    """Per-edge squared membership gaps: (label vs neighbor, labeled vs neighbor)."""
    uu = u_unlabeled[:, graph.r_idx]
    sq_fu = ((labels_onehot[:, graph.k_idx] - uu) ** 2).sum(axis=0)
    sq_uu = ((u_labeled[:, graph.k_idx] - uu) ** 2).sum(axis=0)
    return sq_fu, sq_uu


def coupled_objective(x, u, centers, labels_onehot, graph, s, lambda1, lambda2, gate):
    """Full objective: scatter + safety-weighted fidelity + gated coupling.

    The coupling coefficient is lambda2 * lambda1**gate and multiplies both
    graph terms (label-vs-neighbor and labeled-vs-neighbor gaps).
    """
    l = graph.n_labeled
    d2 = squared_distances(x, centers)
    ul, uu = u[:, :l], u[:, l:]
    scatter = float((u**2 * d2).sum())
    fidelity = float((s * ((ul - labels_onehot) ** 2 * d2[:, :l]).sum(axis=0)).sum())
    b = 2.0 / (s + 1.0) - 1.0
    sq_fu, sq_uu = _edge_squares(ul, uu, labels_onehot, graph)
    coupling = float((graph.weight * s[graph.k_idx] * sq_fu).sum()
                     + (graph.weight * b[graph.k_idx] * sq_uu).sum())
    eff = lambda2 * lambda1**gate
    return scatter + lambda1 * fidelity + eff * coupling


def labeled_membership_update(d2_labeled, labels_onehot, graph, s, lambda1, lambda2,
                              gate, u_unlabeled):
    """Closed-form update of the labeled membership columns.

    Solves each column's simplex-constrained quadratic with
    p = lambda1 s f d^2 + eff b sum_r w u_r and
    q = d^2 (1 + lambda1 s) + eff b sum_r w, where b = 2/(s+1) - 1 and
    eff = lambda2 * lambda1**gate. Neighbor terms are evaluated from the
    previous iterate (Jacobi sweep).
    """
    eff = lambda2 * lambda1**gate
    b = 2.0 / (s + 1.0) - 1.0
    wu = np.add.reduceat(graph.weight * u_unlabeled[:, graph.r_idx], graph.offsets[:-1], axis=1)
    wsum = graph.row_sums()
    p = lambda1 * s * labels_onehot * d2_labeled + eff * b * wu
    q = d2_labeled * (1.0 + lambda1 * s) + eff * (b * wsum)
    return column_quadratic_min(p, q)


def unlabeled_membership_update(d2_unlabeled, labels_onehot, graph, s, lambda1,
                                lambda2, gate, u_labeled):
    """Closed-form update of the unlabeled membership columns.

    Only labeled instances whose neighbor set contains column r contribute;
    points in no neighbor set reduce to the plain quadratic membership rule.
    """
    eff = lambda2 * lambda1**gate
    b = 2.0 / (s + 1.0) - 1.0
    n_u = graph.n_unlabeled
    contrib = graph.weight * (labels_onehot[:, graph.k_idx] * s[graph.k_idx]
                              + u_labeled[:, graph.k_idx] * b[graph.k_idx])
    z = np.stack([np.bincount(graph.r_idx, weights=row, minlength=n_u)
                  for row in contrib])
    t_extra = np.bincount(graph.r_idx,
                          weights=graph.weight * (s[graph.k_idx] + b[graph.k_idx]),
                          minlength=n_u)
    p = eff * z
    q = d2_unlabeled + eff * t_extra
    return column_quadratic_min(p, q)


def safe_center_update(x, u, labels_onehot, s, lambda1, n_labeled):
    """Centers weighted by squared memberships plus the safety-scaled
    squared label residuals of the labeled block."""
    w_all = u**2
    w_lab = lambda1 * s * (u[:, :n_labeled] - labels_onehot) ** 2
    den = w_all.sum(axis=1) + w_lab.sum(axis=1)
    if np.any(den <= 0):
        raise ValueError("cluster with zero total weight in center update")
    num = w_all @ x + w_lab @ x[:n_labeled]
    return num / den[:, None]


def as3_safety_terms(d2_labeled, u_labeled, u_unlabeled, labels_onehot, graph,
                     lambda1, lambda2):
    """Quadratic and linear coefficients of the safety-degree program."""
    sq_fu, sq_uu = _edge_squares(u_labeled, u_unlabeled, labels_onehot, graph)
    w_uu = np.add.reduceat(graph.weight * sq_uu, graph.offsets[:-1])
    w_fu = np.add.reduceat(graph.weight * sq_fu, graph.offsets[:-1])
    omega = 4.0 * lambda2 * w_uu
    delta = (lambda1 * (((u_labeled - labels_onehot) ** 2) * d2_labeled).sum(axis=0)
             + lambda2 * w_fu - 2.0 * lambda2 * w_uu)
    return omega, delta


def as3_safety_update(d2_labeled, u_labeled, u_unlabeled, labels_onehot, graph,
                      lambda1, lambda2, max_iter=10000, tol=1e-8, s0=None):
    """Safety degrees minimizing the separable quadratic over the simplex."""
    omega, delta = as3_safety_terms(d2_labeled, u_labeled, u_unlabeled,
                                    labels_onehot, graph, lambda1, lambda2)
    s = minimize_diag_quadratic_on_simplex(omega, delta, max_iter=max_iter,
                                           tol=tol, s0=s0)
    return As3State(s=s, omega=omega, delta=delta)


def _check_semi_supervised_targets(y):
    y = np.asarray(y, dtype=int)
    labeled = y > 0
    if not labeled.any():
        raise ValueError("no labeled instances (provide class ids 1..c, -1 elsewhere)")
    if labeled.all():
        raise ValueError("no unlabeled instances")
    bad = (~labeled) & (y != -1)
    if bad.any():
        raise ValueError("targets must be class ids 1..c or -1 for unlabeled")
    c = int(y[labeled].max())
    present = np.unique(y[labeled])
    if len(present) != c:
        raise ValueError("every class in 1..c needs at least one labeled instance")
    return y, labeled, c


class _SafeSSCBase(BaseEstimator):
    """Shared fit scaffolding: label-first reordering, graph, initialization."""

    def _prepare(self, X, y, fixed_neighbors=None):
        x = np.asarray(X, dtype=float)
        y, labeled, c = _check_semi_supervised_targets(y)
        order = np.concatenate([np.flatnonzero(labeled), np.flatnonzero(~labeled)])
        x_ord = x[order]
        l = int(labeled.sum())
        n_u = x.shape[0] - l
        y_lab = y[order[:l]]
        index = build_distance_index(x_ord[:l], x_ord[l:])
        if fixed_neighbors is not None:
            dpun = np.full(l, min(fixed_neighbors, n_u), dtype=int)
        else:
            k = min(self.density_k, n_u)
            un_max = self.un_max
            if un_max is None:
                un_max = int(np.floor(np.sqrt(x.shape[0]) + 0.5))
            hi = min(un_max, n_u)
            lo = min(self.un_min, hi)
            dpun = dynamic_pun(density_proxies(k, index), lo, hi)
        graph = graph_weights(index, dpun)
        f = one_hot_labels(y_lab, c)
        centers = class_mean_centers(x_ord[:l], y_lab, c)
        u = np.empty((c, x.shape[0]))
        u[:, :l] = f
        u[:, l:] = fcm_memberships(x_ord[l:], centers)
        return x_ord, order, l, c, f, graph, centers, u

    def _finalize(self, u, order, centers, trace):
        n = u.shape[1]
        inverse = np.empty(n, dtype=int)
        inverse[order] = np.arange(n)
        self.membership_ = u[:, inverse]
        self.cluster_centers_ = centers
        self.labels_ = self.membership_.argmax(axis=0) + 1
        self.trace_ = trace
        self.n_iter_ = trace.n_iter
        self.converged_ = trace.converged
        return self

    def predict(self, X):
        u = fcm_memberships(np.asarray(X, dtype=float), self.cluster_centers_)
        return u.argmax(axis=0) + 1


class KGBS3FCM(_SafeSSCBase):
    """Graph-based safe semi-supervised fuzzy c-means with dynamic KNN
    neighborhoods and a gated coupling term.

    ``fit(X, y)`` expects class ids 1..c on labeled rows and -1 on unlabeled
    rows; every class must be labeled at least once. Cluster i is anchored to
    class i through the labeled-mean initialization, so ``labels_`` are
    directly comparable to class ids.

    Parameters mirror the benchmark protocol: ``density_k`` nearest unlabeled
    neighbors estimate local density, neighbor counts are rescaled into
    [un_min, un_max] (un_max defaults to round(sqrt(n))), and the coupling
    weight lambda2 is multiplied by lambda1 whenever the mean safety degree
    of the previous iterate reaches ``safety_threshold``.
    """

    def __init__(self, lambda1=1.0, lambda2=1.0, density_k=5, safety_threshold=0.6,
                 un_min=5, un_max=None, tol=1e-4, max_iter=100, force_gate=None):
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.density_k = density_k
        self.safety_threshold = safety_threshold
        self.un_min = un_min
        self.un_max = un_max
        self.tol = tol
        self.max_iter = max_iter
        self.force_gate = force_gate  # None follows the step rule; 0/1 pins it

    def _gate(self, mean_s):
        if self.force_gate is not None:
            return self.force_gate
        return step_gate(mean_s, self.safety_threshold)

    def fit(self, X, y):
        x, order, l, c, f, graph, centers, u = self._prepare(X, y)
        lam1, lam2 = self.lambda1, self.lambda2
        safety = safety_degrees(local_inconsistency(u[:, l:], f, graph), graph.dpun)
        s = safety.s
        gate = self._gate(safety.mean)
        trace = FitTrace(initial_objective=coupled_objective(
            x, u, centers, f, graph, s, lam1, lam2, gate))
        trace.mean_safety.append(safety.mean)
        trace.gate.append(gate)
        prev = trace.initial_objective
        for _ in range(self.max_iter):
            d2 = squared_distances(x, centers)
            new_l = labeled_membership_update(d2[:, :l], f, graph, s, lam1, lam2,
                                              gate, u[:, l:])
            new_u = unlabeled_membership_update(d2[:, l:], f, graph, s, lam1, lam2,
                                                gate, u[:, :l])
            u = np.hstack([new_l, new_u])
            centers = safe_center_update(x, u, f, s, lam1, l)
            safety = safety_degrees(local_inconsistency(u[:, l:], f, graph), graph.dpun)
            s = safety.s
            gate = self._gate(safety.mean)
            obj = coupled_objective(x, u, centers, f, graph, s, lam1, lam2, gate)
            trace.objective.append(obj)
            trace.mean_safety.append(safety.mean)
            trace.gate.append(gate)
            if abs(prev - obj) < self.tol:
                trace.converged = True
                prev = obj
                break
            prev = obj
        trace.n_iter = len(trace.objective)
        self.safety_ = s
        self.mean_safety_ = safety.mean
        self.gate_ = gate
        self.labeled_indices_ = order[:l]
        self.graph_ = graph
        return self._finalize(u, order, centers, trace)


class AS3FCM(_SafeSSCBase):
    """Adaptive safety-aware semi-supervised fuzzy c-means.

    Fixed-size unlabeled neighborhoods; safety degrees live on the
    probability simplex and are re-estimated each iteration by a projected
    gradient solve of the separable quadratic program.
    """

    def __init__(self, lambda1=1.0, lambda2=1.0, n_neighbors=5, tol=1e-4,
                 max_iter=100, qp_max_iter=10000, qp_tol=1e-8):
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.n_neighbors = n_neighbors
        self.tol = tol
        self.max_iter = max_iter
        self.qp_max_iter = qp_max_iter
        self.qp_tol = qp_tol

    def fit(self, X, y):
        x, order, l, c, f, graph, centers, u = self._prepare(
            X, y, fixed_neighbors=self.n_neighbors)
        lam1, lam2 = self.lambda1, self.lambda2
        s = np.full(l, 1.0 / l)
        trace = FitTrace(initial_objective=coupled_objective(
            x, u, centers, f, graph, s, lam1, lam2, 0))
        prev = trace.initial_objective
        state = As3State(s=s, omega=np.zeros(l), delta=np.zeros(l))
        for _ in range(self.max_iter):
            d2 = squared_distances(x, centers)
            new_l = labeled_membership_update(d2[:, :l], f, graph, s, lam1, lam2,
                                              0, u[:, l:])
            new_u = unlabeled_membership_update(d2[:, l:], f, graph, s, lam1, lam2,
                                                0, u[:, :l])
            u = np.hstack([new_l, new_u])
            centers = safe_center_update(x, u, f, s, lam1, l)
            d2_l = squared_distances(x[:l], centers)
            state = as3_safety_update(d2_l, u[:, :l], u[:, l:], f, graph, lam1,
                                      lam2, max_iter=self.qp_max_iter,
                                      tol=self.qp_tol, s0=s)
            s = state.s
            obj = coupled_objective(x, u, centers, f, graph, s, lam1, lam2, 0)
            trace.objective.append(obj)
            if abs(prev - obj) < self.tol:
                trace.converged = True
                prev = obj
                break
            prev = obj
        trace.n_iter = len(trace.objective)
        self.safety_ = s
        self.safety_state_ = state
        self.labeled_indices_ = order[:l]
        self.graph_ = graph
        return self._finalize(u, order, centers, trace)
