"""Three independent reach estimators for point clouds plus pointwise checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from . import _backend
from .cloud import DEFAULT_TAU_RANK, PointCloud, default_h, median_spacing, tangent_cones
from .cones import ConvexCone, cone_projection
from .errors import ReachkitError

METHODS = ("federer", "midpoint", "projection")
MAX_EXACT = 4096
# a cone residual below this fraction of the chord length counts as zero
ZERO_REL = 1e-10
# relative slack when comparing a midpoint gap with eps_zero
EPS_SLACK = 1e-9
ROW_CHUNK = 64


@dataclass(frozen=True)
class ReachEstimate:
    method: str
    value: float
    witness: tuple[int, int] | None
    pairs_used: int
    min_pair_distance: float
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ReachkitError(f"unknown method {self.method!r}")
        if not self.value > 0:
            raise ReachkitError("a reach estimate must be positive")
        if (self.witness is None) != math.isinf(self.value):
            raise ReachkitError("witness must be present exactly when the estimate is finite")


def _ordered_pair_blocks(n: int, max_exact: int, seed: int, ordered: bool) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (i, j) index blocks in lexicographic order.

    Up to ``max_exact`` points every pair is visited; beyond that a fixed-seed
    uniform subsample of the same size as the exact budget is used.
    """
    if n <= max_exact:
        for start in range(0, n, ROW_CHUNK):
            rows = np.arange(start, min(n, start + ROW_CHUNK))
            ii = np.repeat(rows, n)
            jj = np.tile(np.arange(n), rows.size)
            keep = ii != jj if ordered else ii < jj
            yield ii[keep], jj[keep]
        return
    budget = max_exact * (max_exact - 1)
    if not ordered:
        budget //= 2
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, size=budget)
    jj = rng.integers(0, n, size=budget)
    keep = ii != jj if ordered else ii < jj
    key = np.unique(ii[keep] * n + jj[keep])
    for start in range(0, key.size, ROW_CHUNK * max_exact):
        blk = key[start:start + ROW_CHUNK * max_exact]
        yield blk // n, blk % n


class _Infimum:
    """Running minimum with lexicographic tie-breaking (blocks arrive in order)."""

    def __init__(self) -> None:
        self.value = math.inf
        self.witness: tuple[int, int] | None = None
        self.count = 0

    def update(self, bounds: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> None:
        if bounds.size == 0:
            return
        k = int(np.argmin(bounds))
        if bounds[k] < self.value:
            self.value = float(bounds[k])
            self.witness = (int(ii[k]), int(jj[k]))


def _check_cloud(cloud: PointCloud) -> list[str]:
    if len(cloud) == 0:
        raise ReachkitError("reach estimation needs a nonempty cloud")
    return ["degenerate cloud: fewer than two points"] if len(cloud) == 1 else []


def federer_reach(
    cloud: PointCloud,
    h: float | None = None,
    tau_rank: float = DEFAULT_TAU_RANK,
    h_min: float | None = None,
    tangents: Sequence[ConvexCone] | None = None,
    max_exact: int = MAX_EXACT,
    seed: int = 0,
) -> ReachEstimate:
    """Infimum over pairs of ``|b-a|^2 / (2 dist(b-a, Tan(a)))``.

    Tangent cones are estimated at scale ``h`` unless ``tangents`` supplies
    them. Pairs closer than ``h_min`` (default three median spacings) are
    skipped.
    """
    warnings = _check_cloud(cloud)
    if warnings:
        return ReachEstimate("federer", math.inf, None, 0, 0.0, tuple(warnings))
    if h_min is None:
        h_min = 3.0 * median_spacing(cloud)
    if h_min <= 0:
        raise ReachkitError("h_min must be positive")
    if tangents is None:
        if h is None:
            h = default_h(cloud)
        if h <= 0:
            raise ReachkitError("h must be positive")
        tangents = tangent_cones(cloud, h, tau_rank)
    elif len(tangents) != len(cloud):
        raise ReachkitError("one tangent cone per point is required")
    d = cloud.ambient_dim
    if any(k.ambient_dim != d for k in tangents):
        raise ReachkitError("tangent cones live in the wrong ambient dimension")
    gens = np.concatenate([k.generators for k in tangents]).reshape(-1, d)
    offsets = np.concatenate(([0], np.cumsum([len(k) for k in tangents]))).astype(np.int64)
    pts = cloud.points
    kern = _backend.kernels()
    best = _Infimum()
    for ii, jj in _ordered_pair_blocks(len(cloud), max_exact, seed, ordered=True):
        delta = kern.cone_residuals(pts, gens, offsets, ii, jj, h_min)
        ok = ~np.isnan(delta)
        ii, jj, delta = ii[ok], jj[ok], delta[ok]
        best.count += ii.size
        diff = pts[jj] - pts[ii]
        e2 = np.einsum("ij,ij->i", diff, diff)
        pos = delta > ZERO_REL * np.sqrt(e2)
        best.update(e2[pos] / (2.0 * delta[pos]), ii[pos], jj[pos])
    return ReachEstimate("federer", best.value, best.witness, best.count, float(h_min))


def midpoint_reach(
    cloud: PointCloud,
    h_min: float | None = None,
    eps_zero: float | None = None,
    max_exact: int = MAX_EXACT,
    seed: int = 0,
) -> ReachEstimate:
    """Infimum over pairs of the radius implied by how far their midpoint sits from the cloud.

    With ``e = |p-q|`` and ``m`` the distance from ``(p+q)/2`` to the cloud,
    a pair bounds the reach by ``(m^2 + e^2/4) / (2m)``. Midpoints within
    ``eps_zero`` (default half a median spacing) of the cloud impose nothing.
    """
    warnings = _check_cloud(cloud)
    if warnings:
        return ReachEstimate("midpoint", math.inf, None, 0, 0.0, tuple(warnings))
    spacing = median_spacing(cloud)
    if h_min is None:
        h_min = 3.0 * spacing
    if eps_zero is None:
        eps_zero = 0.5 * spacing
    if h_min <= 0:
        raise ReachkitError("h_min must be positive")
    if eps_zero < 0:
        raise ReachkitError("eps_zero must be non-negative")
    pts = cloud.points
    tree = cKDTree(pts)
    best = _Infimum()
    for ii, jj in _ordered_pair_blocks(len(cloud), max_exact, seed, ordered=False):
        diff = pts[jj] - pts[ii]
        e2 = np.einsum("ij,ij->i", diff, diff)
        ok = np.sqrt(e2) >= h_min
        ii, jj, e2 = ii[ok], jj[ok], e2[ok]
        best.count += ii.size
        if ii.size == 0:
            continue
        m, _ = tree.query(0.5 * (pts[ii] + pts[jj]))
        far = m > eps_zero * (1.0 + EPS_SLACK)
        m, e2 = m[far], e2[far]
        best.update((m * m + 0.25 * e2) / (2.0 * m), ii[far], jj[far])
    return ReachEstimate("midpoint", best.value, best.witness, best.count, float(h_min))


def default_r_grid(cloud: PointCloud, step: float = 0.02, r_max: float | None = None) -> np.ndarray:
    if r_max is None:
        r_max = float(np.max(np.ptp(cloud.points, axis=0))) if len(cloud) > 1 else 1.0
    count = max(1, int(math.floor(r_max / step + 1e-9)))
    return step * np.arange(1, count + 1)


def _probes(cloud: PointCloud, probe_count: int, r_max: float, seed: int, max_midpoints: int) -> np.ndarray:
    pts = cloud.points
    n, d = pts.shape
    lo = pts.min(axis=0) - r_max
    hi = pts.max(axis=0) + r_max
    halton = qmc.Halton(d, scramble=True, seed=seed).random(probe_count)
    box = lo + halton * (hi - lo)
    # pair midpoints sit on the bisector of their pair, where ambiguity first shows up
    total = n * (n - 1) // 2
    if total <= max_midpoints:
        ii, jj = np.triu_indices(n, k=1)
    else:
        rng = np.random.default_rng(seed)
        key = np.unique(rng.integers(0, n * n, size=max_midpoints))
        ii, jj = key // n, key % n
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
    return np.vstack([0.5 * (pts[ii] + pts[jj]), box])


def projection_uniqueness_reach(
    cloud: PointCloud,
    probe_count: int = 4096,
    r_grid: Sequence[float] | None = None,
    amb_tol: float = 5e-4,
    h_min: float | None = None,
    seed: int = 0,
    max_midpoints: int = 200_000,
) -> ReachEstimate:
    """Largest grid radius below which every probe has a unique nearest cloud point.

    A probe at distance ``d1`` from its nearest point ``p1`` is ambiguous when
    a cloud point at least ``h_min`` (default three median spacings) away
    from ``p1`` lies within ``d1 + amb_tol * spacing`` of the probe; closer
    points count as the same foot point. Probes are all pair midpoints
    (subsampled beyond ``max_midpoints``) plus ``probe_count`` scrambled
    Halton points in the bounding box grown by the largest grid radius.
    """
    warnings = _check_cloud(cloud)
    if r_grid is None:
        r_grid = default_r_grid(cloud)
    grid = np.asarray(r_grid, dtype=float)
    if grid.size == 0:
        raise ReachkitError("r_grid must not be empty")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ReachkitError("r_grid must be positive and strictly increasing")
    if probe_count <= 0:
        raise ReachkitError("probe_count must be positive")
    if warnings:
        return ReachEstimate("projection", math.inf, None, 0, 0.0, tuple(warnings))
    spacing = median_spacing(cloud)
    if h_min is None:
        h_min = 3.0 * spacing
    if h_min <= 0:
        raise ReachkitError("h_min must be positive")
    if amb_tol < 0:
        raise ReachkitError("amb_tol must be non-negative")
    slack = amb_tol * spacing
    r_max = float(grid[-1])
    pts = cloud.points
    tree = cKDTree(pts)
    probes = _probes(cloud, probe_count, r_max, seed, max_midpoints)
    d1, p1 = tree.query(probes)
    inside = d1 < r_max
    probes, d1, p1 = probes[inside], d1[inside], p1[inside]
    kq = min(8, len(cloud))
    dk, ik = tree.query(probes, k=kq)
    dk, ik = dk.reshape(len(probes), kq), ik.reshape(len(probes), kq)
    within = dk <= (d1 + slack)[:, None]
    far = np.linalg.norm(pts[ik] - pts[p1][:, None, :], axis=2) >= h_min
    amb_q = np.where(np.any(within & far, axis=1), ik[np.arange(len(probes)), np.argmax(within & far, axis=1)], -1)
    # probes whose whole k-neighbourhood is within the slack need a full ball query
    for t in np.flatnonzero(within[:, -1] & (amb_q < 0)):
        ball = np.asarray(tree.query_ball_point(probes[t], d1[t] + slack), dtype=np.int64)
        ball.sort()
        dist = np.linalg.norm(pts[ball] - pts[p1[t]], axis=1)
        hits = ball[dist >= h_min]
        if hits.size:
            amb_q[t] = hits[0]
    amb = np.flatnonzero(amb_q >= 0)
    if amb.size == 0:
        return ReachEstimate("projection", math.inf, None, int(len(probes)), float(h_min))
    first = amb[np.argmin(d1[amb])]
    limit = float(d1[first])
    # a probe at distance exactly r does not count against r
    passing = grid[grid <= limit * (1.0 + EPS_SLACK)]
    notes: tuple[str, ...] = ()
    if passing.size:
        value = float(passing[-1])
    else:
        value = float(grid[0])
        notes = ("ambiguity found below the smallest grid radius",)
    pair = (int(p1[first]), int(amb_q[first]))
    return ReachEstimate("projection", value, (min(pair), max(pair)), int(len(probes)), float(h_min), notes)


def d_of_pair(e: float, r: float) -> float:
    """Distance ``r - sqrt(r^2 - e^2/4)`` from a chord midpoint to a circle of radius ``r``."""
    if r <= 0:
        raise ReachkitError("r must be positive")
    if not 0 <= e < 2 * r:
        raise ReachkitError("need 0 <= e < 2r")
    q = 0.25 * e * e
    # rationalised form avoids cancellation for short chords
    return q / (r + math.sqrt(r * r - q))


def angle_bound_check(a: Sequence[float], b: Sequence[float], k: ConvexCone, r: float) -> tuple[bool, float]:
    """Whether the cone holds a direction within ``pi/6 * |b-a| / r`` of ``b - a``.

    The direction tested is the cone projection of ``b - a``; the returned
    angle is the angle to it (``pi/2`` if the projection vanishes).
    """
    v = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    e = float(np.linalg.norm(v))
    if e == 0:
        raise ReachkitError("a and b must differ")
    if e >= r:
        raise ReachkitError("need |b - a| < r")
    proj, dist = cone_projection(v, k)
    pn = float(np.linalg.norm(proj))
    angle = math.pi / 2 if pn <= ZERO_REL * e else math.atan2(dist, pn)
    return angle < math.pi / 6 * e / r, angle
