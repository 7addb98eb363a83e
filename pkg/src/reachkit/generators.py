"""Constructive generators: B-sets, multirotations, the set M and oracle fixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial.distance import pdist

from .cloud import PointCloud
from .cones import ConvexCone
from .errors import ReachkitError

CONTINUITY_TOL = 1e-10
ROOT_TOL = 1e-12
CONCAVITY_GRID = 1000
MAX_DEGREE = 4


# ---------------------------------------------------------------- polynomials

def _pval(coeffs: np.ndarray, x):
    return npoly.polyval(x, coeffs)


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        if hi - lo <= ROOT_TOL * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _real_roots(coeffs: np.ndarray, lo: float, hi: float) -> list[float]:
    """Odd-multiplicity roots in [lo, hi] of a polynomial of degree <= 3.

    The interval is cut at the critical points (closed form, degree <= 2
    derivative) so each piece is monotone, then every sign change is bisected.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return []
    cuts = [lo, hi]
    dc = npoly.polyder(c)
    dc = np.trim_zeros(dc, "b")
    if dc.size == 3:
        a2, a1, a0 = dc[2], dc[1], dc[0]
        disc = a1 * a1 - 4 * a2 * a0
        if disc >= 0:
            sq = math.sqrt(disc)
            q = -0.5 * (a1 + math.copysign(sq, a1))
            for r in (q / a2, a0 / q if q != 0 else None):
                if r is not None and lo < r < hi:
                    cuts.append(r)
    elif dc.size == 2:
        r = -dc[0] / dc[1]
        if lo < r < hi:
            cuts.append(r)
    cuts = sorted(cuts)
    f = lambda x: float(_pval(c, x))  # noqa: E731
    roots: list[float] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        fa, fb = f(a), f(b)
        if fa == 0.0:
            roots.append(a)
        if fa * fb < 0:
            roots.append(_bisect(f, a, b))
    if f(cuts[-1]) == 0.0:
        roots.append(cuts[-1])
    return roots


def _poly_extremes(coeffs: np.ndarray, lo: float, hi: float) -> tuple[float, float]:
    """Exact min and max of a polynomial of degree <= 4 on [lo, hi]."""
    cand = [lo, hi] + _real_roots(npoly.polyder(coeffs), lo, hi) if len(coeffs) > 1 else [lo, hi]
    vals = _pval(coeffs, np.asarray(cand))
    return float(np.min(vals)), float(np.max(vals))


# ---------------------------------------------------------------- semiconcave functions

@dataclass(frozen=True)
class Piece:
    """Polynomial ``sum coeffs[i] * x**i`` on the closed interval ``[lo, hi]``."""

    lo: float
    hi: float
    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ReachkitError(f"piece interval [{self.lo}, {self.hi}] is empty")
        if not 1 <= len(self.coeffs) <= MAX_DEGREE + 1:
            raise ReachkitError(f"piece degree must be at most {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def poly(self) -> np.ndarray:
        return np.asarray(self.coeffs)


@dataclass(frozen=True)
class SemiFunctionSpec:
    """Piecewise polynomial with a semiconcavity (or semiconvexity) modulus ``c``."""

    pieces: tuple[Piece, ...]
    c: float
    kind: str = "semiconcave"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ReachkitError("a piecewise function needs at least one piece")
        if self.kind not in ("semiconcave", "semiconvex"):
            raise ReachkitError(f"unknown kind {self.kind!r}")
        if self.c < 0:
            raise ReachkitError("the semiconcavity modulus must be non-negative")
        for left, right in zip(self.pieces[:-1], self.pieces[1:]):
            if abs(left.hi - right.lo) > CONTINUITY_TOL:
                raise ReachkitError(f"pieces leave a gap or overlap at {left.hi}")
            jump = abs(_pval(left.poly, left.hi) - _pval(right.poly, right.lo))
            if jump > CONTINUITY_TOL:
                raise ReachkitError(f"function jumps by {jump:.3g} at {left.hi}")

    @property
    def lo(self) -> float:
        return self.pieces[0].lo

    @property
    def hi(self) -> float:
        return self.pieces[-1].hi

    @property
    def breaks(self) -> np.ndarray:
        return np.array([p.hi for p in self.pieces[:-1]])

    def _piece_index(self, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.breaks, x, side="left")

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        idx = self._piece_index(xa)
        out = np.empty_like(xa)
        for k, p in enumerate(self.pieces):
            sel = idx == k
            out[sel] = _pval(p.poly, xa[sel])
        return out if out.ndim else float(out)

    def derivative(self, x, side: str = "right"):
        """One-sided derivative; at a break ``side`` picks the adjacent piece."""
        xa = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, xa, side="right" if side == "right" else "left")
        out = np.empty_like(xa)
        for k, p in enumerate(self.pieces):
            sel = idx == k
            out[sel] = _pval(npoly.polyder(p.poly), xa[sel]) if len(p.coeffs) > 1 else 0.0
        return out if out.ndim else float(out)

    def max_slope(self) -> float:
        best = 0.0
        for p in self.pieces:
            if len(p.coeffs) > 1:
                lo, hi = _poly_extremes(npoly.polyder(p.poly), p.lo, p.hi)
                best = max(best, abs(lo), abs(hi))
        return best

    def concavity_defect(self, n: int = CONCAVITY_GRID) -> float:
        """Largest violation of midpoint concavity of ``f -/+ (c/2) x^2`` on an n-point grid."""
        x = np.linspace(self.lo, self.hi, n)
        g = self(x) - 0.5 * self.c * x * x if self.kind == "semiconcave" else -(self(x) + 0.5 * self.c * x * x)
        # g concave  <=>  g(x_i) >= (g(x_{i-1}) + g(x_{i+1})) / 2
        return float(max(0.0, np.max(0.5 * (g[:-2] + g[2:]) - g[1:-1]))) if n > 2 else 0.0

    def check(self) -> None:
        scale = max(1.0, max(abs(c) for p in self.pieces for c in p.coeffs))
        defect = self.concavity_defect()
        if defect > 1e-12 * scale:
            raise ReachkitError(
                f"{self.kind} check failed with modulus c={self.c}: midpoint defect {defect:.3g}"
            )

    def to_dict(self) -> dict:
        return {
            "pieces": [{"interval": [p.lo, p.hi], "coeffs": list(p.coeffs)} for p in self.pieces],
            "c": self.c,
        }

    @classmethod
    def from_dict(cls, data: dict, kind: str) -> "SemiFunctionSpec":
        try:
            pieces = tuple(Piece(float(p["interval"][0]), float(p["interval"][1]), tuple(p["coeffs"])) for p in data["pieces"])
            return cls(pieces, float(data["c"]), kind)
        except (KeyError, TypeError, IndexError) as exc:
            raise ReachkitError(f"malformed function spec: {exc}") from exc


def polynomial(coeffs: Sequence[float], lo: float, hi: float, c: float, kind: str = "semiconcave") -> SemiFunctionSpec:
    """Single-piece convenience constructor."""
    return SemiFunctionSpec((Piece(lo, hi, tuple(coeffs)),), c, kind)


# ---------------------------------------------------------------- B-sets

class BSetSample(NamedTuple):
    cloud: PointCloud
    contact: list[tuple[float, float]]


@dataclass(frozen=True)
class BSetSpec:
    """Region ``bottom(x) <= y <= top(x)`` over ``[0, r]`` (minus) or ``[-r, r]`` (plus)."""

    variant: str
    r: float
    top: SemiFunctionSpec
    bottom: SemiFunctionSpec

    def __post_init__(self) -> None:
        if self.variant not in ("minus", "plus"):
            raise ReachkitError(f"unknown B-set variant {self.variant!r}")
        if self.r <= 0:
            raise ReachkitError("r must be positive")
        if self.top.kind != "semiconcave" or self.bottom.kind != "semiconvex":
            raise ReachkitError("top must be semiconcave and bottom semiconvex")

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.r) if self.variant == "minus" else (-self.r, self.r)

    def check(self) -> None:
        """Raise ``ReachkitError`` naming the first invariant that fails."""
        lo, hi = self.domain
        for name, f in (("top", self.top), ("bottom", self.bottom)):
            if abs(f.lo - lo) > CONTINUITY_TOL or abs(f.hi - hi) > CONTINUITY_TOL:
                raise ReachkitError(f"{name} must be defined exactly on [{lo}, {hi}]")
            f.check()
            if abs(f(0.0)) > CONTINUITY_TOL:
                raise ReachkitError(f"{name}(0) must be 0")
            if abs(f.derivative(0.0, "right")) > CONTINUITY_TOL:
                raise ReachkitError(f"{name} must have right derivative 0 at 0")
            if self.variant == "plus" and abs(f.derivative(0.0, "left")) > CONTINUITY_TOL:
                raise ReachkitError(f"{name} must have two-sided derivative 0 at 0")
        for p in _merged_pieces(self.top, self.bottom):
            tmin = _poly_extremes(p.top, p.lo, p.hi)[0]
            bmax = _poly_extremes(p.bottom, p.lo, p.hi)[1]
            if tmin < -CONTINUITY_TOL:
                raise ReachkitError(f"top is negative on [{p.lo}, {p.hi}]")
            if bmax > CONTINUITY_TOL:
                raise ReachkitError(f"bottom is positive on [{p.lo}, {p.hi}]")

    def max_slope(self) -> float:
        return max(self.top.max_slope(), self.bottom.max_slope())

    def to_dict(self) -> dict:
        return {"variant": self.variant, "r": self.r, "top": self.top.to_dict(), "bottom": self.bottom.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "BSetSpec":
        try:
            return cls(
                str(data["variant"]),
                float(data["r"]),
                SemiFunctionSpec.from_dict(data["top"], "semiconcave"),
                SemiFunctionSpec.from_dict(data["bottom"], "semiconvex"),
            )
        except (KeyError, TypeError) as exc:
            raise ReachkitError(f"malformed B-set spec: missing {exc}") from exc


class _Overlap(NamedTuple):
    lo: float
    hi: float
    top: np.ndarray
    bottom: np.ndarray


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate([c, np.zeros(n - c.size)])


def _merged_pieces(top: SemiFunctionSpec, bottom: SemiFunctionSpec) -> list[_Overlap]:
    cuts = sorted(set([top.lo, top.hi] + top.breaks.tolist() + bottom.breaks.tolist()))
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= CONTINUITY_TOL:
            continue
        mid = np.array(0.5 * (a + b))
        t = top.pieces[int(top._piece_index(mid))].poly
        u = bottom.pieces[int(bottom._piece_index(mid))].poly
        out.append(_Overlap(a, b, _pad(t, MAX_DEGREE + 1), _pad(u, MAX_DEGREE + 1)))
    return out


def contact_set(spec: BSetSpec) -> list[tuple[float, float]]:
    """Connected components of ``{x : top(x) = bottom(x)}`` as closed intervals.

    Works piece by piece on ``D = top - bottom >= 0``: a piece with vanishing
    ``D`` is a whole interval, otherwise zeros of ``D`` are minima, found
    among the endpoints and the sign changes of ``D'``.
    """
    found: list[tuple[float, float]] = []
    for p in _merged_pieces(spec.top, spec.bottom):
        diff = p.top - p.bottom
        scale = max(1.0, float(np.max(np.abs(p.top))), float(np.max(np.abs(p.bottom))))
        tol = ROOT_TOL * scale
        if np.all(np.abs(diff) <= tol):
            found.append((p.lo, p.hi))
            continue
        cand = [p.lo, p.hi] + _real_roots(npoly.polyder(diff), p.lo, p.hi)
        for x in sorted(cand):
            if abs(_pval(diff, x)) <= tol:
                found.append((x, x))
    found.sort()
    merged: list[list[float]] = []
    for a, b in found:
        if merged and a <= merged[-1][1] + 1e-9:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(float(a), float(b)) for a, b in merged]


def _axis_grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9))
    x = lo + step * np.arange(count + 1)
    if hi - x[-1] > 1e-9 * step:
        x = np.append(x, hi)
    return x


def make_bset(spec: BSetSpec, grid_step: float, ambient_dim: int = 2) -> BSetSample:
    """Regular grid sample of the B-set plus its analytic contact set.

    Columns sit at multiples of ``grid_step`` along the axis; each column
    holds both boundary points, the interior grid points ``k * grid_step``
    lying more than a quarter step inside the boundary, and the axis point.
    """
    if grid_step <= 0:
        raise ReachkitError("grid_step must be positive")
    if ambient_dim < 2:
        raise ReachkitError("a B-set needs at least two ambient dimensions")
    spec.check()
    lo, hi = spec.domain
    rows: list[tuple[float, float]] = []
    for x in _axis_grid(lo, hi, grid_step):
        t = float(spec.top(x))
        b = float(spec.bottom(x))
        if t - b <= ROOT_TOL:
            rows.append((x, 0.0))  # contact column: top = bottom = 0 up to rounding
            continue
        rows.append((x, b))
        k0 = math.ceil((b + 0.25 * grid_step) / grid_step - 1e-9)
        k1 = math.floor((t - 0.25 * grid_step) / grid_step + 1e-9)
        for k in range(k0, k1 + 1):
            y = k * grid_step
            if b + 0.25 * grid_step < y < t - 0.25 * grid_step:
                rows.append((x, y))
        if b < 0.0 < t and not b + 0.25 * grid_step < 0.0 < t - 0.25 * grid_step:
            rows.append((x, 0.0))  # the axis stays sampled where the set is thin
        rows.append((x, t))
    pts = np.zeros((len(rows), ambient_dim))
    pts[:, :2] = rows
    return BSetSample(PointCloud(pts), contact_set(spec))


# ---------------------------------------------------------------- multirotations

@dataclass(frozen=True)
class Rotation:
    """Rotation by ``angle`` in the coordinate plane ``(i, j)`` (1-based, 2 <= i < j)."""

    plane: tuple[int, int]
    angle: float


@dataclass(frozen=True)
class MultirotationSpec:
    """Identity over the contact set, one plane rotation over each complementary gap.

    ``rotations[k]`` applies to the k-th open component of the line minus the
    contact set, counted from the left, so there is one more rotation than
    contact intervals.
    """

    ambient_dim: int
    contact: tuple[tuple[float, float], ...]
    rotations: tuple[Rotation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "contact", tuple((float(a), float(b)) for a, b in self.contact))
        object.__setattr__(self, "rotations", tuple(self.rotations))
        d = self.ambient_dim
        if d < 3:
            raise ReachkitError("multirotations need ambient dimension >= 3")
        for a, b in self.contact:
            if not a <= b:
                raise ReachkitError(f"contact interval [{a}, {b}] is reversed")
        for (_, b), (a, _) in zip(self.contact[:-1], self.contact[1:]):
            if not b < a:
                raise ReachkitError("contact intervals must be sorted and disjoint")
        if len(self.rotations) != len(self.contact) + 1:
            raise ReachkitError(
                f"{len(self.contact)} contact intervals leave {len(self.contact) + 1} gaps, "
                f"got {len(self.rotations)} rotations"
            )
        for rot in self.rotations:
            i, j = rot.plane
            if not 2 <= i < j <= d:
                raise ReachkitError(f"rotation plane {rot.plane} must satisfy 2 <= i < j <= {d}")
            if not 0 <= rot.angle < 2 * math.pi:
                raise ReachkitError(f"rotation angle {rot.angle} outside [0, 2pi)")

    def component(self, x: np.ndarray, tol: float = ROOT_TOL) -> np.ndarray:
        """Gap index for each axis value, or -1 inside the contact set."""
        x = np.asarray(x, dtype=float)
        comp = np.zeros(x.shape, dtype=np.int64)
        inside = np.zeros(x.shape, dtype=bool)
        for k, (a, b) in enumerate(self.contact):
            comp += x > b + tol
            inside |= (x >= a - tol) & (x <= b + tol)
        return np.where(inside, -1, comp)

    def to_dict(self) -> dict:
        return {
            "dim": self.ambient_dim,
            "contact": [[a, b] for a, b in self.contact],
            "rotations": [{"plane": list(r.plane), "angle": r.angle} for r in self.rotations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultirotationSpec":
        try:
            return cls(
                int(data["dim"]),
                tuple((float(a), float(b)) for a, b in data["contact"]),
                tuple(Rotation((int(r["plane"][0]), int(r["plane"][1])), float(r["angle"])) for r in data["rotations"]),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ReachkitError(f"malformed multirotation spec: {exc}") from exc


def rotate_points(spec: MultirotationSpec, points: np.ndarray) -> np.ndarray:
    pts = np.array(points, dtype=float)
    comp = spec.component(pts[:, 0])
    for k, rot in enumerate(spec.rotations):
        sel = comp == k
        if not sel.any() or rot.angle == 0.0:
            continue
        i, j = rot.plane[0] - 1, rot.plane[1] - 1
        c, s = math.cos(rot.angle), math.sin(rot.angle)
        xi, xj = pts[sel, i].copy(), pts[sel, j].copy()
        pts[sel, i] = c * xi - s * xj
        pts[sel, j] = s * xi + c * xj
    return pts


def apply_multirotation(spec: MultirotationSpec, cloud: PointCloud) -> PointCloud:
    if cloud.ambient_dim != spec.ambient_dim:
        raise ReachkitError(
            f"cloud dimension {cloud.ambient_dim} does not match spec dimension {spec.ambient_dim}"
        )
    return PointCloud(rotate_points(spec, cloud.points))


def bilipschitz_bound(slope: float) -> float:
    """Distortion constant ``max(2/sqrt(3), sqrt(1 + L^2))`` for boundary slope ``L``."""
    return max(2.0 / math.sqrt(3.0), math.sqrt(1.0 + slope * slope))


def bilipschitz_distortion(transform: Callable[[np.ndarray], np.ndarray], cloud: PointCloud) -> tuple[float, float]:
    """Smallest and largest ratio ``|f(x) - f(y)| / |x - y|`` over distinct pairs."""
    if len(cloud) < 2:
        raise ReachkitError("distortion needs at least two points")
    before = pdist(cloud.points)
    after = pdist(np.asarray(transform(cloud.points), dtype=float))
    ok = before > 0
    ratio = after[ok] / before[ok]
    return float(ratio.min()), float(ratio.max())


# ---------------------------------------------------------------- the set M

@dataclass(frozen=True)
class ExampleM:
    cloud: PointCloud
    flat: PointCloud
    contact: list[tuple[float, float]]
    bset: BSetSpec
    rotation: MultirotationSpec


def _bump(u: float, v: float, kappa: float) -> np.ndarray:
    # kappa (x-u)^2 (v-x)^2 / (v-u)^2: C^1 join with zero, second derivative 2 kappa at the ends
    p = npoly.polymul(npoly.polypow([-u, 1.0], 2), npoly.polypow([v, -1.0], 2))
    return p * (kappa / (v - u) ** 2)


def contact_profile(r: float, contact: Sequence[Sequence[float]], kappa: float = 1.0) -> BSetSpec:
    """Symmetric B-set over [0, r] touching the axis exactly on ``contact``.

    Gaps between contact intervals carry a quartic bump; a gap running to
    ``r`` carries ``kappa (x - u)^2``. Both have curvature at most
    ``2 kappa``, which is the semiconcavity modulus used.
    """
    ivs = [(float(a), float(b)) for a, b in contact]
    if not ivs or ivs[0][0] != 0.0:
        raise ReachkitError("the contact set must start at 0")
    if ivs[-1][1] > r:
        raise ReachkitError("the contact set must lie in [0, r]")
    for a, b in ivs:
        if not a <= b:
            raise ReachkitError(f"contact interval [{a}, {b}] is reversed")
    for (_, b), (a, _) in zip(ivs[:-1], ivs[1:]):
        if not b < a:
            raise ReachkitError("contact intervals must be sorted and disjoint")
    pieces: list[Piece] = []
    for k, (a, b) in enumerate(ivs):
        if b > a:
            pieces.append(Piece(a, b, (0.0,)))
        nxt = ivs[k + 1][0] if k + 1 < len(ivs) else None
        if nxt is not None:
            pieces.append(Piece(b, nxt, tuple(_bump(b, nxt, kappa))))
        elif b < r:
            pieces.append(Piece(b, r, tuple(kappa * npoly.polypow([-b, 1.0], 2))))
    c = 2.0 * kappa
    top = SemiFunctionSpec(tuple(pieces), c, "semiconcave")
    bottom = SemiFunctionSpec(tuple(Piece(p.lo, p.hi, tuple(-x for x in p.coeffs)) for p in pieces), c, "semiconvex")
    return BSetSpec("minus", r, top, bottom)


def leaf_gaps(r: float, contact: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
    """Open components of [0, r] minus the contact set."""
    gaps = []
    for k, (_, b) in enumerate(contact):
        nxt = contact[k + 1][0] if k + 1 < len(contact) else r
        if nxt > b:
            gaps.append((float(b), float(nxt)))
    return gaps


def example_M(
    r: float,
    contact: Sequence[Sequence[float]],
    angles: Sequence[float],
    grid_step: float,
    kappa: float = 1.0,
) -> ExampleM:
    """B-set over ``contact`` in R^3 with each leaf turned about the first axis.

    ``angles`` has one entry per gap of [0, r] minus the contact set; an
    empty list leaves every leaf in place.
    """
    bset = contact_profile(r, contact, kappa)
    sample = make_bset(bset, grid_step, ambient_dim=3)
    ivs = [(float(a), float(b)) for a, b in contact]
    gaps = leaf_gaps(r, ivs)
    angles = [0.0] * len(gaps) if len(angles) == 0 else [float(a) for a in angles]
    if len(angles) != len(gaps):
        raise ReachkitError(f"{len(gaps)} leaves need {len(gaps)} angles, got {len(angles)}")
    # the gap left of 0 and a gap right of r (if the contact set reaches r) hold no points
    rot = [Rotation((2, 3), 0.0)]
    rot += [Rotation((2, 3), a % (2 * math.pi)) for a in angles]
    if ivs[-1][1] >= r:
        rot.append(Rotation((2, 3), 0.0))
    spec = MultirotationSpec(3, tuple(ivs), tuple(rot))
    return ExampleM(apply_multirotation(spec, sample.cloud), sample.cloud, sample.contact, bset, spec)


# ---------------------------------------------------------------- oracle fixtures

@dataclass(frozen=True)
class Fixture:
    cloud: PointCloud
    known_reach: float
    tangents: list[ConvexCone] | None = None


def _line_cone(u: np.ndarray) -> ConvexCone:
    return ConvexCone(u.size, np.vstack([u, -u]))


def circle(radius: float = 1.0, n: int = 256) -> Fixture:
    t = 2 * np.pi * np.arange(n) / n
    pts = radius * np.c_[np.cos(t), np.sin(t)]
    tangents = [_line_cone(np.array([-math.sin(s), math.cos(s)])) for s in t]
    return Fixture(PointCloud(pts), radius, tangents)


def sphere(radius: float = 1.0, n: int = 400) -> Fixture:
    """Fibonacci lattice on the sphere of the given radius."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = math.pi * (3 - math.sqrt(5)) * k
    rho = np.sqrt(1 - z * z)
    unit = np.c_[rho * np.cos(phi), rho * np.sin(phi), z]
    tangents = []
    for p in unit:
        q, _ = np.linalg.qr(np.c_[p, np.eye(3)])
        u, v = q[:, 1], q[:, 2]
        tangents.append(ConvexCone(3, np.vstack([u, -u, v, -v])))
    return Fixture(PointCloud(radius * unit), radius, tangents)


def segment(length: float = 1.0, n: int = 101, dim: int = 2) -> Fixture:
    pts = np.zeros((n, dim))
    pts[:, 0] = np.linspace(0.0, length, n)
    e = np.eye(dim)[0]
    tangents = [_line_cone(e) for _ in range(n)]
    tangents[0] = ConvexCone(dim, e[None, :])
    tangents[-1] = ConvexCone(dim, -e[None, :])
    return Fixture(PointCloud(pts), math.inf, tangents)


def doubleton(h: float = 0.3, dim: int = 2) -> Fixture:
    pts = np.zeros((2, dim))
    pts[1, 0] = 2 * h
    return Fixture(PointCloud(pts), h, [ConvexCone.zero(dim), ConvexCone.zero(dim)])


def convex_polygon(side: float = 1.0, n: int = 10) -> Fixture:
    """Triangular-lattice sample of a regular hexagon with ``n`` lattice steps per side.

    The hexagon's edges follow lattice directions, so the midpoint of any
    two samples is a sample or the midpoint of a lattice edge inside the
    hexagon.
    """
    step = side / n
    a = np.array([1.0, 0.0])
    b = np.array([0.5, math.sqrt(3) / 2])
    pts = [i * a + j * b for i in range(-n, n + 1) for j in range(-n, n + 1) if abs(i + j) <= n]
    return Fixture(PointCloud(step * np.array(pts)), math.inf, None)


CANONICAL = {
    "circle": circle,
    "sphere": sphere,
    "segment": segment,
    "doubleton": doubleton,
    "convex_polygon": convex_polygon,
}


def canonical(name: str, **params) -> Fixture:
    try:
        make = CANONICAL[name]
    except KeyError:
        raise ReachkitError(f"unknown fixture {name!r}; choose from {sorted(CANONICAL)}") from None
    return make(**params)


# ---------------------------------------------------------------- shipped fixtures

def parabola_bset(r: float = 1.0, a: float = 1.0) -> BSetSpec:
    """``-a x^2 <= y <= a x^2`` over ``[0, r]``; touches the axis only at 0."""
    return BSetSpec(
        "minus",
        r,
        polynomial([0.0, 0.0, a], 0.0, r, 2 * a),
        polynomial([0.0, 0.0, -a], 0.0, r, 2 * a, "semiconvex"),
    )


def cantor_intervals(levels: int, lo: float = 0.0, hi: float = 1.0) -> list[tuple[float, float]]:
    ivs = [(lo, hi)]
    for _ in range(levels):
        nxt = []
        for a, b in ivs:
            w = (b - a) / 3
            nxt += [(a, a + w), (b - w, b)]
        ivs = nxt
    return ivs


SHIPPED_EXAMPLES = {
    "single_leaf": dict(r=1.0, contact=[[0.0, 0.0]], angles=[math.pi / 2], kappa=1.0),
    "two_leaves": dict(r=1.0, contact=[[0.0, 0.0], [0.5, 0.5]], angles=[math.pi / 2, math.pi], kappa=2.0),
    "cantor": dict(
        r=1.0,
        contact=[list(c) for c in cantor_intervals(3)],
        angles=[0.3 * (i + 1) for i in range(7)],
        kappa=4.0,
    ),
}


def shipped_example(name: str, grid_step: float) -> ExampleM:
    try:
        params = SHIPPED_EXAMPLES[name]
    except KeyError:
        raise ReachkitError(f"unknown example {name!r}; choose from {sorted(SHIPPED_EXAMPLES)}") from None
    return example_M(grid_step=grid_step, **params)
