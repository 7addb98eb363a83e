"""Linear subspaces, orthogonal projectors and the gap metric between them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ReachkitError

RANK_TOL = 1e-10


def norm_equivalence_constant(d: int) -> float:
    """Constant ``k_d`` with ``k_d**-1 * |M|_GJ <= |M| <= k_d * |M|_GJ`` on d x d matrices."""
    return math.sqrt(d)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^d stored through an orthonormal basis (d x k)."""

    basis: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ReachkitError("subspace basis must be a d x k array")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, d: int) -> "Subspace":
        return cls(np.zeros((d, 0)))

    @classmethod
    def full(cls, d: int) -> "Subspace":
        return cls(np.eye(d))

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _canonical_signs(basis: np.ndarray) -> np.ndarray:
    # make each column's largest-magnitude entry positive so results are reproducible
    if basis.shape[1] == 0:
        return basis
    idx = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[idx, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def orthonormalize(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    tol: float = RANK_TOL,
    ambient_dim: int | None = None,
) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    The dimension is the numerical rank: singular values larger than
    ``tol * sigma_max`` are kept.

    Parameters
    ----------
    vectors : sequence of d-vectors
        Spanning vectors, one per row.
    tol : float
        Relative rank threshold, must be positive.
    ambient_dim : int, optional
        Needed only when ``vectors`` is empty.
    """
    if tol <= 0:
        raise ReachkitError("tol must be positive")
    rows = [np.asarray(v, dtype=float) for v in vectors]
    if not rows:
        if ambient_dim is None:
            raise ReachkitError("ambient_dim is required for an empty vector list")
        return Subspace.zero(ambient_dim)
    d = rows[0].shape
    if any(r.shape != d or r.ndim != 1 for r in rows):
        raise ReachkitError("dimension mismatch among input vectors")
    if ambient_dim is not None and d[0] != ambient_dim:
        raise ReachkitError("vectors do not live in the declared ambient dimension")
    m = np.column_stack(rows)
    if not np.all(np.isfinite(m)):
        raise ReachkitError("vectors must be finite")
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace.zero(m.shape[0])
    rank = int(np.count_nonzero(s > tol * s[0]))
    return Subspace(_canonical_signs(u[:, :rank]))


def projector(s: Subspace) -> np.ndarray:
    """Orthogonal projector ``basis @ basis.T`` onto ``s``."""
    return s.basis @ s.basis.T


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def gap_distance(u: Subspace, v: Subspace) -> float:
    """Gap metric ``|pi_U - pi_V|`` between two subspaces of equal dimension."""
    if u.ambient_dim != v.ambient_dim:
        raise ReachkitError("subspaces live in different ambient spaces")
    if u.dim != v.dim:
        raise ReachkitError(
            f"gap metric needs equal dimensions, got {u.dim} and {v.dim}"
        )
    pu, pv = projector(u), projector(v)
    # a fixed subtraction order makes the result exactly symmetric; the SVD of
    # A and -A may otherwise differ in the last bit
    if pu.tobytes() > pv.tobytes():
        pu, pv = pv, pu
    return operator_norm(pu - pv)


def orthogonal_complement(s: Subspace) -> Subspace:
    d, k = s.basis.shape
    if k == 0:
        return Subspace.full(d)
    if k == d:
        return Subspace.zero(d)
    q, _ = np.linalg.qr(s.basis, mode="complete")
    return Subspace(_canonical_signs(q[:, k:]))


def gj_norm(m: np.ndarray) -> float:
    """Maximum absolute row sum of a square matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ReachkitError("gj_norm needs a square matrix")
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())
