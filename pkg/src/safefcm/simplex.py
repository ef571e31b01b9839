"""Simplex-constrained quadratic solvers shared by the membership updates
and the adaptive safety-degree program."""

from __future__ import annotations

import numpy as np


def project_simplex(v):
    """Euclidean projection onto {s >= 0, sum(s) = 1} by the sorting method."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, len(v) + 1) > 0)[0][-1]
    tau = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + tau, 0.0)


def _column_exact(p, q):
    """Exact minimizer of sum_i q_i u_i^2 - 2 p_i u_i over the simplex.

    Active-set sweep over the breakpoints mu = -p_i: coordinates activate in
    decreasing order of -p_i as the multiplier grows, so at most c candidate
    sets need checking.
    """
    order = np.argsort(-p)  # coordinates in order of activation
    inv_q = 1.0 / q
    best = None
    for t in range(1, len(p) + 1):
        act = order[:t]
        mu = (1.0 - np.sum(p[act] * inv_q[act])) / np.sum(inv_q[act])
        u = np.zeros_like(p)
        u[act] = (p[act] + mu) * inv_q[act]
        if u[act].min() >= 0 and (t == len(p) or p[order[t]] + mu <= 0):
            return u
        if u[act].min() >= 0:
            best = u
    return best if best is not None else np.full(len(p), 1.0 / len(p))


def column_quadratic_min(p, q):
    """Column-wise minimizer of sum_i q_ij u_ij^2 - 2 p_ij u_ij, each column
    constrained to the probability simplex.

    ``p`` and ``q`` are (c, m); q must be nonnegative and p nonnegative.
    The Lagrange closed form u = (p + mu)/q is used wherever it lands inside
    the simplex; columns it would push negative get the exact KKT solution,
    and columns with vanishing q entries put all mass on those free
    coordinates (the zero-distance singularity convention).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c, m = q.shape
    u = np.zeros((c, m))

    zero_q = q <= 0.0
    singular = zero_q.any(axis=0)
    if singular.any():
        cols = np.flatnonzero(singular)
        counts = zero_q[:, cols].sum(axis=0)
        u[:, cols] = zero_q[:, cols] / counts

    regular = ~singular
    if regular.any():
        pr = p[:, regular]
        qr = q[:, regular]
        inv_q = 1.0 / qr
        mu = (1.0 - (pr * inv_q).sum(axis=0)) / inv_q.sum(axis=0)
        ur = (pr + mu) * inv_q
        neg = ur.min(axis=0) < 0
        if neg.any():
            sub = np.flatnonzero(neg)
            for j in sub:
                ur[:, j] = _column_exact(pr[:, j], qr[:, j])
        u[:, regular] = ur
    return u


def minimize_diag_quadratic_on_simplex(omega, delta, max_iter=10000, tol=1e-8, s0=None):
    """Minimize 0.5 * sum omega_k s_k^2 + sum delta_k s_k over the simplex.

    omega must be nonnegative (separable convex case). Solved by projected
    gradient with step 1/max(omega); the all-linear case is handled exactly,
    splitting mass uniformly over tied minima of delta. ``s0`` warm-starts
    the iteration. Raises if the KKT fixed-point residual has not dropped
    below ``tol`` within ``max_iter`` iterations.
    """
    omega = np.asarray(omega, dtype=float)
    delta = np.asarray(delta, dtype=float)
    l = len(omega)
    if l == 1:
        return np.ones(1)
    if np.any(omega < 0):
        raise ValueError("omega must be nonnegative")
    if omega.max() == 0.0:
        winners = np.isclose(delta, delta.min())
        return winners / winners.sum()
    step = 1.0 / omega.max()
    s = project_simplex(s0) if s0 is not None else np.full(l, 1.0 / l)
    residual = np.inf
    for _ in range(max_iter):
        s = project_simplex(s - step * (omega * s + delta))
        residual = np.abs(s - project_simplex(s - (omega * s + delta))).max()
        if residual < tol:
            return s
    raise RuntimeError(
        f"safety QP did not converge in {max_iter} iterations (KKT residual {residual:.3e})"
    )
