"""Point clouds, neighbourhoods, tangent-cone estimates and stratification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .cones import ConvexCone, cone_dimension, contains_line
from .errors import ReachkitError
from .grassmann import RANK_TOL, Subspace, orthonormalize

DEDUP_TOL = 1e-6
DEFAULT_TAU_RANK = 0.15
DEFAULT_TAU_LINE = 0.2


@dataclass(frozen=True)
class StratumLabel:
    """Tangent dimension ``k`` and whether the cone is the whole k-plane."""

    k: int
    full_span: bool

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ReachkitError("stratum dimension must be non-negative")
        if self.k == 0 and not self.full_span:
            raise ReachkitError("a zero-dimensional cone always spans its span")


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    labels: tuple[StratumLabel, ...] | None = None
    flagged: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise ReachkitError("points must form an n x d array")
        if not np.all(np.isfinite(pts)):
            raise ReachkitError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != pts.shape[0]:
                raise ReachkitError("one label per point is required")
            if any(lab.k > pts.shape[1] for lab in labels):
                raise ReachkitError("label dimension exceeds the ambient dimension")
            object.__setattr__(self, "labels", labels)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_labels(self, labels: Sequence[StratumLabel], flagged: Sequence[int] = ()) -> "PointCloud":
        return PointCloud(self.points, tuple(labels), tuple(flagged))

    def __repr__(self) -> str:
        tag = ", labelled" if self.labels is not None else ""
        return f"PointCloud(n={len(self)}, ambient_dim={self.ambient_dim}{tag})"


def median_spacing(cloud: PointCloud) -> float:
    """Median distance from a point to its nearest other point."""
    if len(cloud) < 2:
        raise ReachkitError("spacing needs at least two points")
    dist, _ = cKDTree(cloud.points).query(cloud.points, k=2)
    return float(np.median(dist[:, 1]))


def default_h(cloud: PointCloud) -> float:
    return 4.0 * median_spacing(cloud)


def _sorted_neighbours(points: np.ndarray, a: np.ndarray, cand: np.ndarray, h: float) -> np.ndarray:
    cand = np.asarray(cand, dtype=np.int64)
    diff = points[cand] - a
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    keep = (dist > 0.0) & (dist <= h)
    cand, dist = cand[keep], dist[keep]
    return cand[np.lexsort((cand, dist))]


def neighbors(cloud: PointCloud, a: Sequence[float], h: float) -> list[int]:
    """Indices of points ``p`` with ``0 < |p - a| <= h``, nearest first, ties by index."""
    if h <= 0:
        raise ReachkitError("h must be positive")
    a = np.asarray(a, dtype=float)
    if a.shape != (cloud.ambient_dim,):
        raise ReachkitError("query point has the wrong dimension")
    return _sorted_neighbours(cloud.points, a, np.arange(len(cloud)), h).tolist()


def neighbour_lists(cloud: PointCloud, h: float) -> list[np.ndarray]:
    """``neighbors`` for every cloud point at once.

    A k-d tree proposes candidates with a slightly inflated radius; the final
    filter and ordering are the same exact computation as ``neighbors``.
    """
    if h <= 0:
        raise ReachkitError("h must be positive")
    pts = cloud.points
    tree = cKDTree(pts)
    cands = tree.query_ball_point(pts, r=h * (1 + 1e-9) + 1e-300)
    return [_sorted_neighbours(pts, pts[i], c, h) for i, c in enumerate(cands)]


def _cone_from_secants(secants: np.ndarray, d: int, tau_rank: float) -> ConvexCone:
    if secants.shape[0] == 0:
        return ConvexCone.zero(d)
    units = secants / np.linalg.norm(secants, axis=1)[:, None]
    # local PCA on the raw secants, so very short chords carry little weight
    span = orthonormalize(secants, tau_rank)
    proj = (units @ span.basis) @ span.basis.T
    norms = np.linalg.norm(proj, axis=1)
    proj = proj[norms > 1e-12] / norms[norms > 1e-12, None]
    kept = np.empty((0, d))
    for g in proj:
        if not kept.shape[0] or np.min(np.linalg.norm(kept - g, axis=1)) > DEDUP_TOL:
            kept = np.vstack([kept, g])
    return ConvexCone(d, kept)


def estimate_tangent_cone(
    cloud: PointCloud, a: Sequence[float], h: float, tau_rank: float = DEFAULT_TAU_RANK
) -> ConvexCone:
    """Conical hull of the secant directions from ``a`` to its neighbours within ``h``.

    Secant directions are first restricted to the dominant span of the raw
    secants (singular values above ``tau_rank * sigma_max``), which removes
    the first-order tilt that chords of a curved set have towards its normal
    space.
    """
    if not 0 < tau_rank < 1:
        raise ReachkitError("tau_rank must lie in (0, 1)")
    a = np.asarray(a, dtype=float)
    idx = neighbors(cloud, a, h)
    return _cone_from_secants(cloud.points[idx] - a, cloud.ambient_dim, tau_rank)


def tangent_cones(cloud: PointCloud, h: float, tau_rank: float = DEFAULT_TAU_RANK) -> list[ConvexCone]:
    """Estimated tangent cone at every cloud point."""
    if not 0 < tau_rank < 1:
        raise ReachkitError("tau_rank must lie in (0, 1)")
    pts = cloud.points
    return [
        _cone_from_secants(pts[nb] - pts[i], cloud.ambient_dim, tau_rank)
        for i, nb in enumerate(neighbour_lists(cloud, h))
    ]


def cone_span(k: ConvexCone) -> Subspace:
    return orthonormalize(k.generators, RANK_TOL, ambient_dim=k.ambient_dim)


def psi_k(cloud: PointCloud, a: Sequence[float], h: float, tau_rank: float = DEFAULT_TAU_RANK) -> Subspace:
    """Span of the estimated tangent cone at ``a``."""
    return cone_span(estimate_tangent_cone(cloud, a, h, tau_rank))


def tangent_field(cloud: PointCloud, h: float, tau_rank: float = DEFAULT_TAU_RANK) -> list[Subspace]:
    return [cone_span(k) for k in tangent_cones(cloud, h, tau_rank)]


def label_cone(k: ConvexCone, tau_line: float) -> StratumLabel:
    dim = cone_dimension(k)
    return StratumLabel(dim, True if dim == 0 else contains_line(k, tau_line))


def stratify(
    cloud: PointCloud,
    h: float,
    tau_rank: float = DEFAULT_TAU_RANK,
    tau_line: float = DEFAULT_TAU_LINE,
    declared_dim: int | None = None,
) -> PointCloud:
    """Label every point with its estimated tangent dimension and line test.

    Points whose estimated dimension exceeds ``declared_dim`` are reported in
    ``flagged`` rather than rejected.
    """
    if tau_line <= 0:
        raise ReachkitError("tau_line must be positive")
    labels = [label_cone(k, tau_line) for k in tangent_cones(cloud, h, tau_rank)]
    flagged = ()
    if declared_dim is not None:
        flagged = tuple(i for i, lab in enumerate(labels) if lab.k > declared_dim)
    return cloud.with_labels(labels, flagged)


@dataclass(frozen=True)
class Leaf:
    """Points lying over one open gap ``(lo, hi)`` between consecutive T1 values."""

    lo: float
    hi: float
    indices: tuple[int, ...]


def leaves(
    cloud: PointCloud,
    t1_set: Sequence[float],
    p: float,
    q: float,
    tol: float = 1e-9,
) -> list[Leaf]:
    """Group the points whose first coordinate avoids ``t1_set`` by the gap containing it.

    Gap endpoints are clipped to ``[p, q]``; empty gaps produce no leaf.
    """
    t1 = np.asarray(t1_set, dtype=float)
    if t1.size == 0:
        raise ReachkitError("t1_set must be nonempty")
    if np.any(np.diff(t1) < 0):
        raise ReachkitError("t1_set must be sorted")
    if t1[0] < p - tol or t1[-1] > q + tol:
        raise ReachkitError("t1_set must lie within [p, q]")
    x = cloud.points[:, 0]
    outside = np.flatnonzero((x < p - tol) | (x > q + tol))
    if outside.size:
        i = int(outside[0])
        raise ReachkitError(f"point {i} projects to {x[i]!r}, outside [{p!r}, {q!r}]")
    pos = np.searchsorted(t1, x, side="left")
    hit = np.zeros(len(x), dtype=bool)
    for side in (pos - 1, pos):
        ok = (side >= 0) & (side < t1.size)
        hit[ok] |= np.abs(x[ok] - t1[side[ok]]) <= tol
    bounds = np.concatenate(([p], t1, [q]))
    out: list[Leaf] = []
    # gap g sits between bounds[g] and bounds[g + 1]
    for gap in range(t1.size + 1):
        members = np.flatnonzero(~hit & (pos == gap))
        if members.size:
            lo = max(bounds[gap], p)
            hi = min(bounds[gap + 1], q)
            out.append(Leaf(float(lo), float(hi), tuple(members.tolist())))
    return out
