import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reachkit.cloud import (
    PointCloud,
    StratumLabel,
    estimate_tangent_cone,
    leaves,
    median_spacing,
    neighbors,
    neighbour_lists,
    psi_k,
    stratify,
)
from reachkit.cones import cone_dimension, contains_line
from reachkit.errors import ReachkitError
from reachkit.generators import circle, make_bset, parabola_bset, segment
from reachkit.grassmann import gap_distance, orthonormalize


def circle_cloud(n):
    return circle(1.0, n).cloud


def disk_grid(step, radius=1.0):
    k = int(radius / step) + 1
    g = step * np.arange(-k, k + 1)
    x, y = np.meshgrid(g, g)
    pts = np.c_[x.ravel(), y.ravel()]
    return PointCloud(pts[np.hypot(pts[:, 0], pts[:, 1]) <= radius])


def brute_neighbours(pts, a, h):
    d = np.linalg.norm(pts - a, axis=1)
    idx = [i for i in range(len(pts)) if 0 < d[i] <= h]
    return sorted(idx, key=lambda i: (d[i], i))


class TestPointCloud:
    def test_rejects_non_finite(self):
        with pytest.raises(ReachkitError):
            PointCloud([[0.0, np.nan]])

    def test_rejects_ragged(self):
        with pytest.raises(ReachkitError):
            PointCloud(np.zeros(3))

    def test_label_count(self):
        with pytest.raises(ReachkitError):
            PointCloud(np.zeros((2, 2)), (StratumLabel(1, True),))

    def test_zero_label_spans(self):
        with pytest.raises(ReachkitError):
            StratumLabel(0, False)


class TestNeighbours:
    def test_isolated(self):
        cloud = PointCloud([[0.0, 0.0], [5.0, 0.0]])
        assert neighbors(cloud, [0.0, 0.0], 1.0) == []

    def test_circle_four_nearest(self):
        cloud = circle_cloud(64)
        got = neighbors(cloud, cloud.points[0], 0.2)
        assert sorted(got) == [1, 2, 62, 63]
        assert got == brute_neighbours(cloud.points, cloud.points[0], 0.2)

    def test_query_point_excluded(self):
        cloud = PointCloud([[0.0], [1.0], [2.0]])
        assert neighbors(cloud, [1.0], 1.0) == [0, 2]

    def test_h_positive(self):
        with pytest.raises(ReachkitError):
            neighbors(PointCloud([[0.0]]), [0.0], 0.0)

    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 2.0))
    def test_batched_lists_match_definition(self, seed, h):
        rng = np.random.default_rng(seed)
        # grid coordinates create many exact distance ties
        pts = rng.integers(0, 6, size=(40, 2)) * 0.25
        cloud = PointCloud(pts)
        lists = neighbour_lists(cloud, h)
        for i in range(len(cloud)):
            assert lists[i].tolist() == neighbors(cloud, pts[i], h) == brute_neighbours(pts, pts[i], h)


class TestTangentCone:
    seg = PointCloud(np.c_[np.linspace(0, 1, 11), np.zeros(11)])

    def test_segment_endpoint_is_a_ray(self):
        k = estimate_tangent_cone(self.seg, [0.0, 0.0], 0.25)
        assert cone_dimension(k) == 1 and not contains_line(k, 0.2)

    def test_segment_interior_is_a_line(self):
        k = estimate_tangent_cone(self.seg, [0.5, 0.0], 0.25)
        assert cone_dimension(k) == 1 and contains_line(k, 0.2)

    def test_disk_interior(self):
        step = 0.05
        k = estimate_tangent_cone(disk_grid(step), [0.1, 0.0], 3 * step)
        assert cone_dimension(k) == 2 and contains_line(k, 0.2)

    def test_empty_neighbourhood(self):
        assert len(estimate_tangent_cone(self.seg, [5.0, 5.0], 0.25)) == 0

    def test_tau_rank_range(self):
        with pytest.raises(ReachkitError):
            estimate_tangent_cone(self.seg, [0.0, 0.0], 0.25, tau_rank=1.0)

    def test_psi_on_circle(self):
        cloud = circle_cloud(256)
        for i in (0, 17, 100):
            t = 2 * math.pi * i / 256
            analytic = orthonormalize([[-math.sin(t), math.cos(t)]])
            assert gap_distance(psi_k(cloud, cloud.points[i], 0.2), analytic) <= 0.05

    def test_psi_isolated_and_disk(self):
        assert psi_k(self.seg, [5.0, 5.0], 0.25).dim == 0
        plane = psi_k(disk_grid(0.05), [0.0, 0.0], 0.15)
        assert plane.dim == 2

    def test_psi_error_shrinks_with_density(self):
        # eight spacings tilt chords by up to ~0.4 rad at n=64, so the rank cut must sit above that
        tau = 0.4
        errors = []
        for n in (64, 128, 256):
            cloud = circle_cloud(n)
            h = 8 * 2 * math.pi / n
            worst = 0.0
            # shift the query off the sample so the neighbourhood is asymmetric
            for i in range(0, n, 7):
                t = 2 * math.pi * (i + 0.3) / n
                a = [math.cos(t), math.sin(t)]
                analytic = orthonormalize([[-math.sin(t), math.cos(t)]])
                worst = max(worst, gap_distance(psi_k(cloud, a, h, tau), analytic))
            errors.append(worst)
        assert errors[0] > errors[1] > errors[2]


def labels_of(cloud, h):
    return stratify(cloud, h).labels


class TestStratify:
    def test_circle(self):
        assert set(labels_of(circle_cloud(64), 0.2)) == {StratumLabel(1, True)}

    def test_segment_in_r3(self):
        labs = labels_of(segment(1.0, 21, dim=3).cloud, 0.2)
        assert labs[0] == labs[-1] == StratumLabel(1, False)
        assert set(labs[1:-1]) == {StratumLabel(1, True)}

    def test_bset_origin_and_interior(self):
        step = 0.02
        sample = make_bset(parabola_bset(), step)
        labs = labels_of(sample.cloud, 4 * step)
        pts = sample.cloud.points
        origin = int(np.flatnonzero(np.all(pts == 0, axis=1))[0])
        assert labs[origin] == StratumLabel(1, False)
        # points whose vertical extent exceeds the neighbourhood are interior-like
        thick = np.abs(pts[:, 1]) < pts[:, 0] ** 2 - 4 * step
        assert thick.sum() > 100
        assert all(labs[i].k == 2 for i in np.flatnonzero(thick))

    def test_t1_closedness_proxy(self):
        step = 0.02
        h = 4 * step
        cloud = make_bset(parabola_bset(), step).cloud
        labs = labels_of(cloud, h)
        near = np.linalg.norm(cloud.points, axis=1) <= h / 2
        assert all(labs[i].k == 1 for i in np.flatnonzero(near))

    def test_declared_dimension_flags(self):
        out = stratify(disk_grid(0.1), 0.3, declared_dim=1)
        assert len(out.flagged) > 0
        assert all(out.labels[i].k > 1 for i in out.flagged)

    def test_tau_line_positive(self):
        with pytest.raises(ReachkitError):
            stratify(circle_cloud(16), 0.5, tau_line=0.0)

    def test_refinement_keeps_known_labels(self):
        for n, h in ((64, 0.2), (128, 0.1)):
            assert set(labels_of(circle_cloud(n), h)) == {StratumLabel(1, True)}
        for n, h in ((21, 0.2), (41, 0.1)):
            labs = labels_of(segment(1.0, n).cloud, h)
            assert labs[0] == labs[-1] == StratumLabel(1, False)
            assert set(labs[1:-1]) == {StratumLabel(1, True)}
        for step in (0.1, 0.05):
            cloud = disk_grid(step)
            labs = labels_of(cloud, 3 * step)
            deep = np.hypot(cloud.points[:, 0], cloud.points[:, 1]) < 1 - 3 * step
            assert all(labs[i] == StratumLabel(2, True) for i in np.flatnonzero(deep))


class TestLeaves:
    def test_single_contact(self):
        cloud = make_bset(parabola_bset(), 0.05).cloud
        out = leaves(cloud, [0.0], 0.0, 1.0)
        assert len(out) == 1
        assert (out[0].lo, out[0].hi) == (0.0, 1.0)
        assert len(out[0].indices) == len(cloud) - 1

    def test_full_grid_has_no_leaves(self):
        cloud = segment(1.0, 11).cloud
        assert leaves(cloud, cloud.points[:, 0], 0.0, 1.0) == []

    def test_two_components(self):
        cloud = PointCloud([[0.25, 0.1], [0.5, 0.0], [0.75, 0.1], [0.0, 0.0]])
        out = leaves(cloud, [0.0, 0.5], 0.0, 1.0)
        assert [(lf.lo, lf.hi, lf.indices) for lf in out] == [(0.0, 0.5, (0,)), (0.5, 1.0, (2,))]

    def test_outside_slab(self):
        with pytest.raises(ReachkitError):
            leaves(PointCloud([[1.5, 0.0]]), [0.0], 0.0, 1.0)

    def test_bad_t1(self):
        cloud = PointCloud([[0.5, 0.0]])
        with pytest.raises(ReachkitError):
            leaves(cloud, [], 0.0, 1.0)
        with pytest.raises(ReachkitError):
            leaves(cloud, [0.6, 0.2], 0.0, 1.0)


def test_projection_inequality_on_skewered_bset():
    # the parabola B-set contains [0, 1] on the axis, its T1 point is the origin and its reach is 1/2
    cloud = make_bset(parabola_bset(), 0.02).cloud
    dist = np.linalg.norm(cloud.points, axis=1)
    close = dist < 0.5
    assert np.all(np.abs(cloud.points[close, 0]) >= math.sqrt(3) / 2 * dist[close])


def test_median_spacing():
    assert median_spacing(segment(1.0, 11).cloud) == pytest.approx(0.1)
    with pytest.raises(ReachkitError):
        median_spacing(PointCloud([[0.0]]))
