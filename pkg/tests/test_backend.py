import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reachkit import _backend, _pykernels
from reachkit.generators import circle
from reachkit.reach import federer_reach

compiled = pytest.importorskip("reachkit._ckernels")


def unit_rows(rng, n, d):
    g = rng.normal(size=(n, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(0, 6))
def test_nnls_agrees(seed, d, m):
    rng = np.random.default_rng(seed)
    g = unit_rows(rng, m, d).T.reshape(d, m)
    v = rng.normal(size=d)
    xc, rc = compiled.nnls(np.ascontiguousarray(g), v)
    xp, rp = _pykernels.nnls(g, v)
    assert rc == pytest.approx(rp, abs=1e-12)
    assert np.allclose(xc, xp, atol=1e-10)


@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_cone_residuals_agree(seed, d):
    rng = np.random.default_rng(seed)
    n = 12
    pts = rng.normal(size=(n, d))
    counts = rng.integers(0, 4, n)
    offsets = np.r_[0, np.cumsum(counts)].astype(np.int64)
    gens = unit_rows(rng, int(offsets[-1]), d)
    pi, pj = np.triu_indices(n, 1)
    pi, pj = pi.astype(np.int64), pj.astype(np.int64)
    a = compiled.cone_residuals(pts, gens, offsets, pi, pj, 0.5)
    b = _pykernels.cone_residuals(pts, gens, offsets, pi, pj, 0.5)
    assert np.array_equal(np.isnan(a), np.isnan(b))
    ok = ~np.isnan(a)
    assert np.allclose(a[ok], b[ok], atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.integers(0, 2))
def test_pair_gaps_agree(seed, d, k):
    rng = np.random.default_rng(seed)
    n = 10
    bases = np.stack([np.linalg.qr(rng.normal(size=(d, d)))[0][:, :k] for _ in range(n)])
    pi, pj = (x.astype(np.int64) for x in np.triu_indices(n, 1))
    a = compiled.pair_gaps(bases, pi, pj)
    b = _pykernels.pair_gaps(bases, pi, pj)
    assert np.allclose(a, b, atol=1e-12)


def test_switching():
    assert _backend.available() == ["compiled", "python"]
    fx = circle(1.0, 128)
    start = _backend.name()
    try:
        _backend.use("python")
        slow = federer_reach(fx.cloud, h=0.2)
        _backend.use("compiled")
        fast = federer_reach(fx.cloud, h=0.2)
    finally:
        _backend.use(start)
    assert fast.value == pytest.approx(slow.value, rel=1e-12)
    assert fast.witness == slow.witness
    with pytest.raises(ValueError):
        _backend.use("gpu")
