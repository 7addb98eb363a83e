"""Atomic matrix-valued interval functions and their ordered product integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ReachkitError
from .grassmann import Subspace, gj_norm, norm_equivalence_constant, operator_norm, projector


@dataclass(frozen=True, eq=False)
class AtomicIntervalFunction:
    """``alpha(s, t) = sum of jumps[i]`` over atoms with ``s < locations[i] <= t``.

    ``weights[i]`` dominates ``gj_norm(jumps[i])``; their sums give the
    scalar function that bounds the product integral.
    """

    dim: int
    locations: np.ndarray
    jumps: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        loc = np.array(self.locations, dtype=float).reshape(-1)
        jumps = np.array(self.jumps, dtype=float).reshape(loc.size, self.dim, self.dim)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != loc.size:
            raise ReachkitError("one weight per atom is required")
        if np.any(np.diff(loc) <= 0):
            raise ReachkitError("atom locations must be strictly increasing")
        for i in range(loc.size):
            if w[i] < gj_norm(jumps[i]) * (1 - 1e-12):
                raise ReachkitError(f"weight of atom {i} is below the GJ norm of its jump")
        for arr in (loc, jumps, w):
            arr.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, dim: int, atoms: Sequence[tuple[float, np.ndarray]], weights: Sequence[float] | None = None):
        """Build from (location, jump) pairs in any order; weights default to GJ norms."""
        order = sorted(range(len(atoms)), key=lambda i: atoms[i][0])
        loc = [atoms[i][0] for i in order]
        jumps = np.array([atoms[i][1] for i in order], dtype=float).reshape(-1, dim, dim)
        if weights is None:
            w = [gj_norm(j) for j in jumps]
        else:
            w = [weights[i] for i in order]
        return cls(dim, np.array(loc), jumps, np.array(w))

    def __len__(self) -> int:
        return self.locations.size

    def _window(self, s: float, t: float) -> slice:
        if s > t:
            raise ReachkitError(f"interval ({s}, {t}] is reversed")
        lo = int(np.searchsorted(self.locations, s, side="right"))
        hi = int(np.searchsorted(self.locations, t, side="right"))
        return slice(lo, hi)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"t": float(t), "jump": j.tolist(), "w": float(w)}
                for t, j, w in zip(self.locations, self.jumps, self.weights)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicIntervalFunction":
        try:
            d = int(data["dim"])
            atoms = data["atoms"]
            loc = [float(a["t"]) for a in atoms]
            jumps = np.array([a["jump"] for a in atoms], dtype=float).reshape(-1, d, d)
            w = [float(a["w"]) if "w" in a else gj_norm(j) for a, j in zip(atoms, jumps)]
        except (KeyError, TypeError, ValueError) as exc:
            raise ReachkitError(f"malformed interval function: {exc}") from exc
        return cls(d, np.array(loc), jumps, np.array(w))


def alpha_eval(f: AtomicIntervalFunction, s: float, t: float) -> np.ndarray:
    w = f._window(s, t)
    return f.jumps[w].sum(axis=0) if w.stop > w.start else np.zeros((f.dim, f.dim))


def product_integral_atomic(f: AtomicIntervalFunction, s: float, t: float) -> np.ndarray:
    """Ordered product of ``I + J`` over atoms in ``(s, t]``, earliest atom leftmost."""
    out = np.eye(f.dim)
    eye = np.eye(f.dim)
    for j in f.jumps[f._window(s, t)]:
        out = out @ (eye + j)
    return out


def product_integral_partition(f: AtomicIntervalFunction, s: float, t: float, mesh: float) -> np.ndarray:
    """Finite product of ``I + alpha(cell)`` over a uniform partition of ``(s, t]``."""
    if mesh <= 0:
        raise ReachkitError("mesh must be positive")
    f._window(s, t)
    if t == s:
        return np.eye(f.dim)
    cells = max(1, math.ceil((t - s) / mesh))
    cuts = s + (t - s) * np.arange(cells + 1) / cells
    cuts[-1] = t
    out = np.eye(f.dim)
    eye = np.eye(f.dim)
    for a, b in zip(cuts[:-1], cuts[1:]):
        w = f._window(a, b)
        if w.stop > w.start:
            out = out @ (eye + f.jumps[w].sum(axis=0))
    return out


def total_weight(f: AtomicIntervalFunction, s: float, t: float) -> float:
    return float(f.weights[f._window(s, t)].sum())


def domination_bound(f: AtomicIntervalFunction, s: float, t: float) -> float:
    """``exp(sum of weights in (s, t]) - 1``, a GJ-norm bound on ``mu(s, t) - I``."""
    return math.expm1(total_weight(f, s, t))


def build_alpha_from_leaves(
    leaf_data: Sequence[tuple[float, Subspace, Subspace]],
) -> AtomicIntervalFunction:
    """One atom per leaf at its right end ``b``: projector at ``a`` minus projector at ``b``.

    Weights are ``sqrt(d)`` times the operator norm of the jump, which bounds
    its GJ norm.
    """
    if not leaf_data:
        raise ReachkitError("at least one leaf is required")
    d = leaf_data[0][1].ambient_dim
    seen: set[float] = set()
    atoms = []
    weights = []
    for b, at_a, at_b in leaf_data:
        if at_a.ambient_dim != d or at_b.ambient_dim != d:
            raise ReachkitError("leaf planes must share one ambient space")
        if at_a.dim != 2 or at_b.dim != 2:
            raise ReachkitError("leaf planes must be two-dimensional")
        if b in seen:
            raise ReachkitError(f"duplicate leaf endpoint {b}")
        seen.add(b)
        jump = projector(at_a) - projector(at_b)
        atoms.append((float(b), jump))
        weights.append(norm_equivalence_constant(d) * operator_norm(jump))
    return AtomicIntervalFunction.from_atoms(d, atoms, weights)
