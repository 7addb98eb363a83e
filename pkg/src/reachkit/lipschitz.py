"""Lipschitz behaviour of tangent fields and the first-order Whitney condition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _backend
from .cloud import DEFAULT_TAU_RANK, PointCloud, tangent_field
from .errors import ReachkitError
from .grassmann import Subspace, orthogonal_complement, projector
from .reach import MAX_EXACT, _ordered_pair_blocks

CONSTANTS = ("psi1_bound", "L_k_theta_r", "Ltilde_k_theta_r", "psi2_special")
SLACK = 0.05


def empirical_lipschitz(
    points: np.ndarray,
    values: Sequence[Subspace],
    h_min: float = 0.0,
    max_exact: int = MAX_EXACT,
    seed: int = 0,
) -> tuple[float, tuple[int, int] | None]:
    """Largest ``gap(values[i], values[j]) / |x_i - x_j|`` over pairs at least ``h_min`` apart.

    Ties resolve to the lexicographically first pair. With no admissible
    pair the constant is 0 and the pair is None.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != len(values):
        raise ReachkitError("one subspace per point is required")
    if len(values) < 2:
        raise ReachkitError("at least two points are required")
    dims = {v.dim for v in values}
    if len(dims) > 1:
        raise ReachkitError(f"subspaces of mixed dimensions {sorted(dims)}")
    if {v.ambient_dim for v in values} != {values[0].ambient_dim}:
        raise ReachkitError("subspaces live in different ambient spaces")
    bases = np.stack([v.basis for v in values])
    best, arg = 0.0, None
    for ii, jj in _ordered_pair_blocks(len(values), max_exact, seed, ordered=False):
        diff = pts[jj] - pts[ii]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        ok = (dist >= h_min) & (dist > 0)
        if not ok.any():
            continue
        ii, jj, dist = ii[ok], jj[ok], dist[ok]
        ratio = _backend.pair_gaps(bases, ii, jj) / dist
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best, arg = float(ratio[k]), (int(ii[k]), int(jj[k]))
    return best, arg


def paper_constant(name: str, k: int, theta: float | None, r: float) -> float:
    """Explicit Lipschitz constants for tangent fields of sets with reach ``r``.

    ``L_k_theta_r`` bounds the field between related points,
    ``Ltilde_k_theta_r`` is its enlarged form, ``psi1_bound`` is ``1/r`` for
    curves and ``psi2_special`` is ``2^12 pi / r`` for planar strata.
    """
    if name not in CONSTANTS:
        raise ReachkitError(f"unknown constant {name!r}; choose from {list(CONSTANTS)}")
    if r <= 0:
        raise ReachkitError("r must be positive")
    if k < 1:
        raise ReachkitError("k must be at least 1")
    if name == "psi1_bound":
        if k != 1:
            raise ReachkitError("psi1_bound applies only to k = 1")
        return 1.0 / r
    if name == "psi2_special":
        if k != 2:
            raise ReachkitError("psi2_special applies only to k = 2")
        return 2.0**12 * math.pi / r
    if theta is None or theta <= 0:
        raise ReachkitError(f"{name} needs theta > 0")
    kf = math.factorial(k)
    if name == "L_k_theta_r":
        return k / ((kf * theta) ** 2 * r)
    return 2.0 ** (2 * (k + 2)) * k**3 / (kf**2 * theta**2 * r)


@dataclass(frozen=True)
class LipschitzReport:
    empirical_constant: float
    argmax_pair: tuple[int, int] | None
    paper_constant: float
    constant_name: str
    satisfied: bool
    flagged: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "empirical": self.empirical_constant,
            "paper": self.paper_constant,
            "name": self.constant_name,
            "satisfied": self.satisfied,
            "argmax": list(self.argmax_pair) if self.argmax_pair else None,
            "flagged": list(self.flagged),
        }


def compare(
    empirical: float,
    argmax: tuple[int, int] | None,
    name: str,
    k: int,
    theta: float | None,
    r: float,
    slack: float = SLACK,
    flagged: Sequence[int] = (),
) -> LipschitzReport:
    bound = paper_constant(name, k, theta, r)
    return LipschitzReport(empirical, argmax, bound, name, empirical <= bound * (1 + slack), tuple(flagged))


def stratum(cloud: PointCloud, k: int) -> np.ndarray:
    if cloud.labels is None:
        raise ReachkitError("the cloud carries no stratum labels")
    return np.array([i for i, lab in enumerate(cloud.labels) if lab.k == k], dtype=np.int64)


def transition_points(cloud: PointCloud, h: float) -> tuple[int, ...]:
    """Points with a differently labelled point within ``2h``.

    Labels there are the least trustworthy, so bounds that assume a clean
    stratification are reported alongside them.
    """
    if cloud.labels is None:
        raise ReachkitError("the cloud carries no stratum labels")
    labels = cloud.labels
    tree = cKDTree(cloud.points)
    out = []
    for i, nb in enumerate(tree.query_ball_point(cloud.points, 2 * h)):
        if any(labels[j] != labels[i] for j in nb):
            out.append(i)
    return tuple(out)


def lipschitz_check(
    cloud: PointCloud,
    k: int,
    h: float,
    name: str,
    r: float,
    theta: float | None = None,
    h_min: float = 0.0,
    tau_rank: float = DEFAULT_TAU_RANK,
    tangents: Sequence[Subspace] | None = None,
    slack: float = SLACK,
) -> LipschitzReport:
    """Empirical constant of the tangent field on stratum ``k`` against a named bound."""
    members = stratum(cloud, k)
    if members.size < 2:
        raise ReachkitError(f"stratum {k} has fewer than two points")
    field_ = tangent_field(cloud, h, tau_rank) if tangents is None else list(tangents)
    values = [field_[i] for i in members]
    emp, arg = empirical_lipschitz(cloud.points[members], values, h_min)
    if arg is not None:
        arg = (int(members[arg[0]]), int(members[arg[1]]))
    near = set(transition_points(cloud, h))
    flagged = [int(i) for i in members if int(i) in near]
    return compare(emp, arg, name, k, theta, r, slack, flagged)


def _as_stack(a, n: int, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.shape[0] != n:
        raise ReachkitError(f"{name} needs one entry per domain point")
    return arr


def whitney_check(domain, f, phi) -> float:
    """Smallest ``c`` with ``|phi(y) - phi(x)| <= c|y - x|`` and
    ``|f(y) - f(x) - phi(x)(y - x)| <= c|y - x|^2`` over all ordered pairs.

    ``phi`` holds one n x m matrix per domain point.
    """
    x = np.asarray(domain, dtype=float)
    if x.ndim != 2:
        raise ReachkitError("domain must be an N x m array")
    n_pts, m = x.shape
    fv = _as_stack(f, n_pts, "f").reshape(n_pts, -1)
    n = fv.shape[1]
    ph = _as_stack(phi, n_pts, "phi")
    if ph.shape != (n_pts, n, m):
        raise ReachkitError(f"phi must have shape ({n_pts}, {n}, {m}), got {ph.shape}")
    if n_pts < 2:
        return 0.0
    c = 0.0
    for i in range(n_pts):
        dx = x - x[i]
        dist = np.linalg.norm(dx, axis=1)
        others = np.arange(n_pts) != i
        if np.any(dist[others] == 0):
            raise ReachkitError(f"domain point {i} is repeated")
        dx, dist = dx[others], dist[others]
        w1 = np.linalg.norm(ph[others] - ph[i], ord=2, axis=(1, 2)) / dist
        resid = fv[others] - fv[i] - dx @ ph[i].T
        w2 = np.linalg.norm(resid, axis=1) / dist**2
        c = max(c, float(w1.max()), float(w2.max()))
    return c


class WhitneyData(NamedTuple):
    domain: np.ndarray
    f: np.ndarray
    phi: np.ndarray
    indices: np.ndarray


def tdmnapl_data(
    cloud: PointCloud,
    stratum_k: int,
    h: float,
    tau_rank: float = DEFAULT_TAU_RANK,
    tangents: Sequence[Subspace] | None = None,
) -> WhitneyData:
    """First-order data ``f(x) = P x`` and ``phi(x) = P + Q(x)`` over stratum ``k``.

    ``P`` projects onto the tangent space at the first stratum point and
    ``Q(x)`` onto the normal space of the tangent field at ``x``.
    """
    members = stratum(cloud, stratum_k)
    if members.size == 0:
        raise ReachkitError(f"stratum {stratum_k} is empty")
    field_ = tangent_field(cloud, h, tau_rank) if tangents is None else list(tangents)
    base = projector(field_[members[0]])
    pts = cloud.points[members]
    f = pts @ base.T
    phi = np.stack([base + projector(orthogonal_complement(field_[i])) for i in members])
    return WhitneyData(pts, f, phi, members)
