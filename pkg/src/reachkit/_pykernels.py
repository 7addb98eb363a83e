"""Pure numpy implementations of the hot pairwise kernels.

Used when the compiled extension is unavailable; ``_ckernels.pyx`` mirrors
these functions one to one.
"""

from __future__ import annotations

import numpy as np

NNLS_TOL = 1e-12
DEPENDENT_TOL = 1e-10


def _solve_passive(g: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    # least squares on the passive columns via Gram-Schmidt with one
    # reorthogonalisation pass; None when the columns are numerically dependent
    d, p = g.shape
    if p > d:
        return None
    q = np.zeros((d, p))
    r = np.zeros((p, p))
    for c in range(p):
        col = g[:, c].copy()
        for _ in range(2):
            for c2 in range(c):
                dot = q[:, c2] @ col
                r[c2, c] += dot
                col -= dot * q[:, c2]
        nrm = np.sqrt(col @ col)
        if nrm <= DEPENDENT_TOL:
            return None
        r[c, c] = nrm
        q[:, c] = col / nrm
    z = q.T @ v
    for c in range(p - 1, -1, -1):
        z[c] = (z[c] - r[c, c + 1:] @ z[c + 1:]) / r[c, c]
    return z


def nnls(g: np.ndarray, v: np.ndarray, tol: float = NNLS_TOL, max_iter: int | None = None):
    """Active-set solution of ``min |g @ x - v|`` subject to ``x >= 0``.

    Parameters
    ----------
    g : (d, m) array
        Columns are the cone generators (unit vectors).
    v : (d,) array
        Target vector.
    tol : float
        Relative optimality tolerance on the dual vector ``g.T @ r``.
    max_iter : int, optional
        Outer iteration cap, ``10 * m`` by default.

    Returns
    -------
    x : (m,) array
        Non-negative coefficients.
    residual : float
        ``|g @ x - v|``, the distance from ``v`` to the cone.
    """
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    m = g.shape[1]
    x = np.zeros(m)
    scale = float(np.linalg.norm(v))
    if m == 0 or scale == 0.0:
        return x, scale
    thresh = tol * scale
    max_iter = 10 * m if max_iter is None else max_iter
    passive = np.zeros(m, dtype=bool)
    blocked = np.zeros(m, dtype=bool)
    w = g.T @ v
    for _ in range(max_iter):
        free = ~passive & ~blocked
        if not free.any():
            break
        wf = np.where(free, w, -np.inf)
        j = int(np.argmax(wf))
        if wf[j] <= thresh:
            break
        passive[j] = True
        changed = False
        first = True
        while True:
            idx = np.flatnonzero(passive)
            z = _solve_passive(g[:, idx], v)
            if first and (z is None or z[np.searchsorted(idx, j)] <= 0.0):
                # column j cannot enter the passive set
                passive[j] = False
                blocked[j] = True
                break
            first = False
            if z is None:
                break
            if np.all(z > 0.0):
                x[:] = 0.0
                x[idx] = z
                changed = True
                break
            xi = x[idx]
            neg = np.flatnonzero(z <= 0.0)
            ratios = xi[neg] / (xi[neg] - z[neg])
            k = int(np.argmin(ratios))
            x[idx] = xi + ratios[k] * (z - xi)
            x[idx[neg[k]]] = 0.0
            passive[idx[x[idx] <= 0.0]] = False
            x[~passive] = 0.0
            changed = True
            if not passive.any():
                break
        if changed:
            blocked[:] = False
            w = g.T @ (v - g @ x)
    return x, float(np.linalg.norm(v - g @ x))


def cone_residuals(points, gens, offsets, pi, pj, h_min):
    """Distance from ``points[pj] - points[pi]`` to the cone at ``pi``.

    ``gens[offsets[i]:offsets[i+1]]`` holds the unit generators of the cone
    attached to point ``i``. Pairs shorter than ``h_min`` get ``nan``.
    """
    out = np.full(len(pi), np.nan)
    for t, (i, j) in enumerate(zip(pi, pj)):
        v = points[j] - points[i]
        if np.sqrt(v @ v) < h_min:
            continue
        g = gens[offsets[i]:offsets[i + 1]].T
        out[t] = nnls(g, v)[1]
    return out


def pair_gaps(bases, pi, pj):
    """Gap distance between ``bases[pi]`` and ``bases[pj]`` (orthonormal d x k stacks)."""
    bases = np.asarray(bases, dtype=float)
    if bases.shape[2] == 0:
        return np.zeros(len(pi))
    u = bases[pi]
    v = bases[pj]
    # |pi_U - pi_V| = |(I - pi_V) U| for equal dimensions
    resid = u - v @ (np.swapaxes(v, 1, 2) @ u)
    return np.linalg.norm(resid, ord=2, axis=(1, 2))
