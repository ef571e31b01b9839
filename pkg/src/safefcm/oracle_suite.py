"""Fast deterministic validation of every closed form against brute force.

Each check builds a tiny seeded instance, computes the production value and
the independent oracle value, and reports both. The whole suite is meant to
finish in seconds; the ``safefcm oracle`` subcommand runs it end to end.
"""

from __future__ import annotations

import numpy as np

from . import oracles
from .fcm import (KMeans, fcm_centers, fcm_memberships, fcm_objective,
                  squared_distances, ssfcm_fidelity)
from .metrics import aggregate
from .neighbors import (build_distance_index, dynamic_pun, graph_weights,
                        knn_unlabeled, pairwise_distances)
from .safe import (as3_safety_terms, coupled_objective, labeled_membership_update,
                   local_inconsistency, safe_center_update,
                   unlabeled_membership_update)
from .simplex import minimize_diag_quadratic_on_simplex, project_simplex


def _random_membership(rng, c, n):
    u = rng.uniform(0.05, 1.0, size=(c, n))
    return u / u.sum(axis=0)


def _small_instance(rng, n=8, l=3, c=2, dim=2):
    """Random labeled-first instance with graph, labels, and safety degrees."""
    x = rng.normal(size=(n, dim))
    index = build_distance_index(x[:l], x[l:])
    dpun = rng.integers(1, n - l + 1, size=l)
    graph = graph_weights(index, dpun)
    y = rng.integers(1, c + 1, size=l)
    f = np.zeros((c, l))
    f[y - 1, np.arange(l)] = 1.0
    u = _random_membership(rng, c, n)
    centers = rng.normal(size=(c, dim))
    s = rng.uniform(0.2, 1.0, size=l)
    return x, l, c, f, graph, u, centers, s


def _graph_lists(graph):
    neigh = [list(graph.neighbors(k)) for k in range(graph.n_labeled)]
    weights = [list(graph.weights_of(k)) for k in range(graph.n_labeled)]
    return neigh, weights


def check_pairwise(seed=0):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(7, 3)), rng.normal(size=(5, 3))
    got = pairwise_distances(a, b)
    want = oracles.naive_pairwise_distances(a, b)
    err = float(np.abs(got - want).max())
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_knn(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(55, 3))
    index = build_distance_index(x[:5], x[5:])
    ok = True
    for k_lab in range(5):
        order = sorted(range(50), key=lambda j: (index.dist[k_lab, j], j))
        ok = ok and list(knn_unlabeled(5, k_lab, index)) == order[:5]
    return ok, {"tolerance": "exact"}


def check_avg_knn(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(40, 4))
    index = build_distance_index(x[:3], x[3:])
    from .neighbors import avg_knn_distance

    got = avg_knn_distance(5, 1, index)
    want = float(np.mean(sorted(index.dist[1])[:5]))
    err = abs(got - want)
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_dynamic_pun():
    dbar = np.array([1.0, 2.0, 3.0])  # midpoint between min and max
    got = dynamic_pun(dbar, 5, 23)
    want = np.array([5, 14, 23])  # 5 + 18*0.5 = 14 by hand
    return bool((got == want).all()), {"got": got.tolist(), "want": want.tolist()}


def check_fcm_objective(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(9, 3))
    centers = rng.normal(size=(3, 3))
    u = _random_membership(rng, 3, 9)
    got = fcm_objective(u, centers, x)
    want = oracles.naive_fcm_objective(u, centers, x)
    err = abs(got - want)
    return err <= 1e-12 * max(1.0, abs(want)), {"max_abs_err": err, "tolerance": "1e-12 rel"}


def check_fcm_membership(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(6, 2))
    centers = rng.normal(size=(3, 2))
    got = fcm_memberships(x, centers)
    want = np.array([oracles.naive_fcm_membership_column(pt, centers) for pt in x]).T
    err = float(np.abs(got - want).max())
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_fcm_centers(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(7, 3))
    u = _random_membership(rng, 2, 7)
    got = fcm_centers(x, u)
    want = oracles.naive_fcm_centers(x, u)
    err = float(np.abs(got - want).max())
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_ssfcm_fidelity(seed=0):
    rng = np.random.default_rng(seed)
    n, c = 8, 2
    x = rng.normal(size=(n, 2))
    centers = rng.normal(size=(c, 2))
    u = _random_membership(rng, c, n)
    b = (rng.uniform(size=n) < 0.5).astype(float)
    y = rng.integers(1, c + 1, size=n)
    f = np.zeros((c, n))
    f[y - 1, np.arange(n)] = b
    got = ssfcm_fidelity(u, f, b, centers, x)
    want = oracles.naive_ssfcm_fidelity(u, f, b, centers, x)
    err = abs(got - want)
    return err <= 1e-12 * max(1.0, abs(want)), {"max_abs_err": err, "tolerance": "1e-12 rel"}


def check_kmeans_inertia(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(20, 2))
    km = KMeans(n_clusters=3, random_state=seed).fit(x)
    want = oracles.naive_kmeans_inertia(x, km.cluster_centers_, km.labels_)
    err = abs(km.inertia_ - want)
    return err <= 1e-9, {"max_abs_err": err, "tolerance": 1e-9}


def check_local_inconsistency(seed=0):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, _, _ = _small_instance(rng, n=9, l=3)
    got = local_inconsistency(u[:, l:], f, graph)
    neigh, _ = _graph_lists(graph)
    want = oracles.naive_local_inconsistency(u[:, l:], f, neigh)
    err = float(np.abs(got - want).max())
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_coupled_objective(seed=0):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, centers, s = _small_instance(rng)
    neigh, weights = _graph_lists(graph)
    errs = []
    for gate in (0, 1):
        got = coupled_objective(x, u, centers, f, graph, s, 0.7, 1.3, gate)
        want = oracles.naive_coupled_objective(x, u, centers, f, neigh, weights,
                                               s, 0.7, 1.3, gate)
        errs.append(abs(got - want))
    err = max(errs)
    return err <= 1e-10, {"max_abs_err": err, "tolerance": 1e-10}


def _column_objective(x, u, centers, f, graph, s, lam1, lam2, gate, col):
    neigh, weights = _graph_lists(graph)

    def evaluate(candidate):
        trial = u.copy()
        trial[:, col] = candidate
        return oracles.naive_coupled_objective(x, trial, centers, f, neigh,
                                               weights, s, lam1, lam2, gate)

    return evaluate


def check_labeled_update_grid(seed=0, lam1=0.8, lam2=1.5, gate=1):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, centers, s = _small_instance(rng, n=6, l=2)
    d2 = squared_distances(x, centers)
    new_l = labeled_membership_update(d2[:, :l], f, graph, s, lam1, lam2, gate,
                                      u[:, l:])
    worst = 0.0
    for k in range(l):
        evaluate = _column_objective(x, u, centers, f, graph, s, lam1, lam2, gate, k)
        best_col, _ = oracles.grid_column_minimizer(evaluate, c)
        worst = max(worst, float(np.abs(new_l[:, k] - best_col).max()))
    return worst <= 2e-3, {"max_abs_err": worst, "tolerance": 2e-3}


def check_unlabeled_update_grid(seed=0, lam1=0.8, lam2=1.5, gate=1):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, centers, s = _small_instance(rng, n=6, l=2)
    d2 = squared_distances(x, centers)
    new_u = unlabeled_membership_update(d2[:, l:], f, graph, s, lam1, lam2, gate,
                                        u[:, :l])
    worst = 0.0
    for r in range(x.shape[0] - l):
        evaluate = _column_objective(x, u, centers, f, graph, s, lam1, lam2, gate,
                                     l + r)
        best_col, _ = oracles.grid_column_minimizer(evaluate, c)
        worst = max(worst, float(np.abs(new_u[:, r] - best_col).max()))
    return worst <= 2e-3, {"max_abs_err": worst, "tolerance": 2e-3}


def check_as3_updates_grid(seed=0):
    # The fixed-neighborhood updates are the gate-free special case.
    ok1, d1 = check_labeled_update_grid(seed=seed, lam1=0.6, lam2=2.0, gate=0)
    ok2, d2 = check_unlabeled_update_grid(seed=seed, lam1=0.6, lam2=2.0, gate=0)
    return ok1 and ok2, {"labeled": d1, "unlabeled": d2}


def check_safety_qp_grid(seed=0):
    rng = np.random.default_rng(seed)
    omega = rng.uniform(0.5, 4.0, size=3)
    delta = rng.normal(size=3)
    s = minimize_diag_quadratic_on_simplex(omega, delta)
    s_grid, val_grid = oracles.grid_simplex_quadratic(omega, delta)
    val = 0.5 * float((omega * s**2).sum()) + float((delta * s).sum())
    err_s = float(np.abs(s - s_grid).max())
    err_v = val - val_grid  # solver value may only undershoot the grid
    kkt = float(np.abs(s - project_simplex(s - (omega * s + delta))).max())
    ok = err_s <= 2e-3 and err_v <= 1e-6 and kkt < 1e-8
    return ok, {"max_abs_err_s": err_s, "obj_gap": err_v, "kkt_residual": kkt,
                "tolerance": {"s": 2e-3, "objective": 1e-6, "kkt": 1e-8}}


def check_center_gradient(seed=0, lam1=0.9, lam2=1.4, gate=1):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, _, s = _small_instance(rng)
    centers = safe_center_update(x, u, f, s, lam1, l)
    worst = 0.0
    for i in range(c):
        def f_of_center(v, i=i):
            trial = centers.copy()
            trial[i] = v
            return coupled_objective(x, u, trial, f, graph, s, lam1, lam2, gate)

        grad = oracles.central_difference_gradient(f_of_center, centers[i])
        j0 = f_of_center(centers[i])
        worst = max(worst, float(np.abs(grad).max()) / max(1.0, abs(j0)))
    return worst <= 1e-6, {"max_rel_grad": worst, "tolerance": 1e-6}


def check_aggregate(seed=0):
    rng = np.random.default_rng(seed)
    vals = rng.uniform(0.4, 1.0, size=20)
    agg = aggregate(list(vals))
    mean, std = oracles.two_pass_mean_std(list(vals))
    err = max(abs(agg.mean - mean), abs(agg.std - std))
    return err <= 1e-12, {"max_abs_err": err, "tolerance": 1e-12}


def check_as3_safety_terms(seed=0):
    rng = np.random.default_rng(seed)
    x, l, c, f, graph, u, centers, _ = _small_instance(rng)
    d2_l = squared_distances(x[:l], centers)
    omega, delta = as3_safety_terms(d2_l, u[:, :l], u[:, l:], f, graph, 0.7, 1.3)
    # loop evaluation of the same coefficients
    neigh, weights = _graph_lists(graph)
    worst = 0.0
    for k in range(l):
        w_uu = sum(w * sum((u[i, k] - u[i, l + r]) ** 2 for i in range(c))
                   for r, w in zip(neigh[k], weights[k]))
        w_fu = sum(w * sum((f[i, k] - u[i, l + r]) ** 2 for i in range(c))
                   for r, w in zip(neigh[k], weights[k]))
        lin = 0.7 * sum((u[i, k] - f[i, k]) ** 2 * d2_l[i, k] for i in range(c))
        worst = max(worst, abs(omega[k] - 4 * 1.3 * w_uu),
                    abs(delta[k] - (lin + 1.3 * w_fu - 2 * 1.3 * w_uu)))
    return worst <= 1e-12, {"max_abs_err": worst, "tolerance": 1e-12}


ALL_CHECKS = {
    "pairwise_distances_vs_loop": check_pairwise,
    "knn_vs_full_sort": check_knn,
    "avg_knn_vs_sorted_prefix": check_avg_knn,
    "dynamic_pun_midpoint": check_dynamic_pun,
    "fcm_objective_vs_loop": check_fcm_objective,
    "fcm_membership_vs_direct": check_fcm_membership,
    "fcm_centers_vs_loop": check_fcm_centers,
    "ssfcm_fidelity_vs_loop": check_ssfcm_fidelity,
    "kmeans_inertia_recompute": check_kmeans_inertia,
    "local_inconsistency_vs_loop": check_local_inconsistency,
    "coupled_objective_vs_loop": check_coupled_objective,
    "labeled_update_vs_grid": check_labeled_update_grid,
    "unlabeled_update_vs_grid": check_unlabeled_update_grid,
    "fixed_neighbor_updates_vs_grid": check_as3_updates_grid,
    "safety_qp_vs_grid": check_safety_qp_grid,
    "center_update_zero_gradient": check_center_gradient,
    "safety_qp_coefficients_vs_loop": check_as3_safety_terms,
    "aggregate_vs_two_pass": check_aggregate,
}


def run_oracle_suite(seed=0):
    results = {}
    for name, fn in ALL_CHECKS.items():
        try:
            ok, detail = fn() if fn.__code__.co_argcount == 0 else fn(seed)
        except Exception as exc:
            ok, detail = False, {"exception": f"{type(exc).__name__}: {exc}"}
        results[name] = {"pass": bool(ok), "detail": _jsonable(detail)}
    return results


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
