"""Independent brute-force computations for validating the closed forms.

Everything here is written with plain loops and dense grids, deliberately
avoiding the vectorized production code paths, so the two sides of every
check stay independent.
"""

from __future__ import annotations

import math

import numpy as np


def naive_pairwise_distances(a, b):
    out = np.empty((len(a), len(b)))
    for i in range(len(a)):
        for j in range(len(b)):
            out[i, j] = math.sqrt(sum((ai - bj) ** 2 for ai, bj in zip(a[i], b[j])))
    return out


def naive_fcm_objective(u, centers, x, m=2.0):
    total = 0.0
    for i in range(len(centers)):
        for k in range(len(x)):
            d2 = sum((xv - cv) ** 2 for xv, cv in zip(x[k], centers[i]))
            total += (u[i][k] ** m) * d2
    return total


def naive_fcm_membership_column(point, centers, m=2.0):
    d2 = [sum((pv - cv) ** 2 for pv, cv in zip(point, c)) for c in centers]
    if any(v == 0.0 for v in d2):
        hits = [1.0 if v == 0.0 else 0.0 for v in d2]
        total = sum(hits)
        return [h / total for h in hits]
    col = []
    for i in range(len(centers)):
        denom = sum((d2[i] / d2[j]) ** (1.0 / (m - 1.0)) for j in range(len(centers)))
        col.append(1.0 / denom)
    return col


def naive_fcm_centers(x, u, m=2.0):
    c, n = len(u), len(x)
    dim = len(x[0])
    centers = np.zeros((c, dim))
    for i in range(c):
        wsum = 0.0
        acc = np.zeros(dim)
        for k in range(n):
            w = u[i][k] ** m
            wsum += w
            acc += w * np.asarray(x[k], dtype=float)
        centers[i] = acc / wsum
    return centers


def naive_ssfcm_fidelity(u, f, b, centers, x, m=2.0):
    total = 0.0
    for k in range(len(x)):
        for i in range(len(centers)):
            d2 = sum((xv - cv) ** 2 for xv, cv in zip(x[k], centers[i]))
            total += (u[i][k] - f[i][k] * b[k]) ** m * d2
    return total


def naive_kmeans_inertia(x, centers, assign):
    total = 0.0
    for k in range(len(x)):
        total += sum((xv - cv) ** 2 for xv, cv in zip(x[k], centers[assign[k] - 1]))
    return total


def naive_local_inconsistency(u_unlabeled, labels_onehot, neighbor_lists):
    c = len(labels_onehot)
    out = []
    for k, neigh in enumerate(neighbor_lists):
        acc = 0.0
        for r in neigh:
            acc += sum(abs(u_unlabeled[i][r] - labels_onehot[i][k]) for i in range(c))
        out.append(acc)
    return np.array(out)


def naive_coupled_objective(x, u, centers, labels_onehot, neighbor_lists, weights,
                            s, lambda1, lambda2, gate):
    """Term-by-term loop evaluation of the safety-aware objective."""
    c = len(centers)
    n = len(x)
    l = len(neighbor_lists)
    d2 = [[sum((xv - cv) ** 2 for xv, cv in zip(x[k], centers[i])) for k in range(n)]
          for i in range(c)]
    scatter = sum(u[i][k] ** 2 * d2[i][k] for i in range(c) for k in range(n))
    fidelity = sum(s[k] * (u[i][k] - labels_onehot[i][k]) ** 2 * d2[i][k]
                   for i in range(c) for k in range(l))
    coupling = 0.0
    for k in range(l):
        bk = 2.0 / (s[k] + 1.0) - 1.0
        for r, w in zip(neighbor_lists[k], weights[k]):
            fu = sum((labels_onehot[i][k] - u[i][l + r]) ** 2 for i in range(c))
            uu = sum((u[i][k] - u[i][l + r]) ** 2 for i in range(c))
            coupling += w * (s[k] * fu + bk * uu)
    return scatter + lambda1 * fidelity + lambda2 * lambda1**gate * coupling


def grid_column_minimizer(objective_of_column, c, step=1e-3):
    """Dense simplex grid search for a single membership column (c == 2).

    Returns (best_column, best_value); the grid walks u1 from 0 to 1.
    """
    if c != 2:
        raise ValueError("grid search oracle is defined for c == 2")
    best_col, best_val = None, np.inf
    m = int(round(1.0 / step))
    for t in range(m + 1):
        u1 = t * step
        col = np.array([u1, 1.0 - u1])
        val = objective_of_column(col)
        if val < best_val:
            best_val, best_col = val, col
    return best_col, best_val


def grid_simplex_quadratic(omega, delta, step=1e-3):
    """Dense grid minimizer of 0.5*sum omega s^2 + sum delta s on the
    3-simplex. Returns (s, value)."""
    if len(omega) != 3:
        raise ValueError("grid oracle is defined for l == 3")
    m = int(round(1.0 / step))
    best_s, best_val = None, np.inf
    for a in range(m + 1):
        s1 = a * step
        for b_ in range(m + 1 - a):
            s2 = b_ * step
            s3 = 1.0 - s1 - s2
            val = (0.5 * (omega[0] * s1**2 + omega[1] * s2**2 + omega[2] * s3**2)
                   + delta[0] * s1 + delta[1] * s2 + delta[2] * s3)
            if val < best_val:
                best_val, best_s = val, np.array([s1, s2, s3])
    return best_s, best_val


def central_difference_gradient(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e.flat[j] = h
        grad.flat[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def two_pass_mean_std(values):
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)
