"""Finitely generated convex cones, simplex fullness and relatedness."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .errors import ReachkitError
from .grassmann import RANK_TOL, orthonormalize

UNIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConvexCone:
    """Conical hull of unit generators in R^d; no generators means the zero cone."""

    ambient_dim: int
    generators: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.generators, dtype=float).reshape(-1, self.ambient_dim)
        norms = np.linalg.norm(g, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ReachkitError("cone generators must be unit vectors")
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    @classmethod
    def from_directions(cls, directions: Sequence[Sequence[float]], ambient_dim: int) -> "ConvexCone":
        """Normalise nonzero directions and build the cone they generate."""
        g = np.array(directions, dtype=float).reshape(-1, ambient_dim)
        norms = np.linalg.norm(g, axis=1)
        g = g[norms > 0] / norms[norms > 0, None]
        return cls(ambient_dim, g)

    @classmethod
    def zero(cls, d: int) -> "ConvexCone":
        return cls(d, np.zeros((0, d)))

    def __len__(self) -> int:
        return self.generators.shape[0]

    def __repr__(self) -> str:
        return f"ConvexCone(ambient_dim={self.ambient_dim}, generators={len(self)})"


def cone_projection(v: Sequence[float], k: ConvexCone) -> tuple[np.ndarray, float]:
    """Nearest point of ``k`` to ``v`` and the distance to it."""
    v = np.asarray(v, dtype=float)
    if v.shape != (k.ambient_dim,):
        raise ReachkitError(f"vector of shape {v.shape} does not match cone dimension {k.ambient_dim}")
    if not np.all(np.isfinite(v)):
        raise ReachkitError("vector must be finite")
    x, dist = _backend.kernels().nnls(k.generators.T, v)
    return k.generators.T @ x, float(dist)


def cone_distance(v: Sequence[float], k: ConvexCone) -> float:
    """Euclidean distance from ``v`` to the cone, by non-negative least squares."""
    return cone_projection(v, k)[1]


def cone_dimension(k: ConvexCone, tol: float = RANK_TOL) -> int:
    return orthonormalize(k.generators, tol, ambient_dim=k.ambient_dim).dim


def contains_line(k: ConvexCone, tol: float) -> bool:
    """True when every spanning direction ``u`` has both ``u`` and ``-u`` within ``tol`` of the cone."""
    if tol <= 0:
        raise ReachkitError("tol must be positive")
    span = orthonormalize(k.generators, RANK_TOL, ambient_dim=k.ambient_dim)
    for u in span.basis.T:
        if cone_distance(u, k) > tol or cone_distance(-u, k) > tol:
            return False
    return True


def _as_vertices(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[0] < 2:
        raise ReachkitError("a simplex needs at least two vertices given as rows")
    return v


def simplex_volume(vertices) -> float:
    """k-dimensional volume of the simplex spanned by k+1 vertices."""
    v = _as_vertices(vertices)
    k = v.shape[0] - 1
    edges = (v[1:] - v[0]).T
    if k > edges.shape[0]:
        return 0.0
    r = np.linalg.qr(edges, mode="r")
    return float(np.prod(np.abs(np.diag(r)))) / math.factorial(k)


def _diam_sq(v: np.ndarray) -> float:
    diff = v[:, None, :] - v[None, :, :]
    return float(np.max(np.einsum("ijk,ijk->ij", diff, diff)))


def fullness(vertices) -> float:
    """Volume divided by the k-th power of the diameter."""
    v = _as_vertices(vertices)
    k = v.shape[0] - 1
    dsq = _diam_sq(v)
    if dsq == 0.0:
        raise ReachkitError("fullness is undefined when all vertices coincide")
    # exact even powers keep simple cases like the right isosceles triangle exact
    denom = dsq ** (k // 2)
    if k % 2:
        denom *= math.sqrt(dsq)
    return simplex_volume(v) / denom


@dataclass(frozen=True)
class RelatedResult:
    related: bool
    witness: tuple[int, ...] | None
    fullness: float
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.related


def related(
    a: Sequence[float],
    b: Sequence[float],
    candidates: Sequence[Sequence[float]],
    k: int,
    theta: float,
    budget: int = 100_000,
) -> RelatedResult:
    """Search ``candidates`` for k-1 points completing ``a, b`` to a simplex of fullness >= theta.

    Subsets are enumerated in lexicographic order while their count stays
    within ``budget``; otherwise points are chosen greedily. A negative answer
    is only conclusive in the exhaustive mode. The witness holds candidate
    indices.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cands = np.asarray(candidates, dtype=float).reshape(-1, a.shape[0])
    if k < 2:
        raise ReachkitError("relatedness needs k >= 2")
    if theta <= 0:
        raise ReachkitError("theta must be positive")
    if np.array_equal(a, b):
        raise ReachkitError("a and b must differ")
    if k - 1 > len(cands):
        raise ReachkitError(f"need {k - 1} candidates, got {len(cands)}")
    base = [a, b]
    best = 0.0
    if math.comb(len(cands), k - 1) <= budget:
        for subset in itertools.combinations(range(len(cands)), k - 1):
            f = fullness(np.vstack(base + [cands[i] for i in subset]))
            if f >= theta:
                return RelatedResult(True, subset, f, True)
            best = max(best, f)
        return RelatedResult(False, None, best, True)
    chosen: list[int] = []
    f = 0.0
    for _ in range(k - 1):
        pick, pick_f = -1, -1.0
        for i in range(len(cands)):
            if i in chosen:
                continue
            fi = fullness(np.vstack(base + [cands[c] for c in chosen] + [cands[i]]))
            if fi > pick_f:
                pick, pick_f = i, fi
        chosen.append(pick)
        f = pick_f
    if f >= theta:
        return RelatedResult(True, tuple(chosen), f, False)
    return RelatedResult(False, None, f, False)
