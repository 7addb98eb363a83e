"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 512]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from reachkit import _backend, _pykernels
from reachkit.cloud import tangent_cones
from reachkit.generators import circle, sphere
from reachkit.reach import federer_reach


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, seed=0):
    rng = np.random.default_rng(seed)
    cloud = sphere(1.0, n).cloud
    cones = tangent_cones(cloud, 0.3)
    gens = np.vstack([k.generators for k in cones])
    offsets = np.r_[0, np.cumsum([len(k) for k in cones])].astype(np.int64)
    pi, pj = (a.astype(np.int64) for a in np.triu_indices(n, 1))
    bases = np.stack([np.linalg.qr(rng.normal(size=(3, 3)))[0][:, :2] for _ in range(n)])
    g = rng.normal(size=(3, 6))
    g /= np.linalg.norm(g, axis=0)
    vs = rng.normal(size=(2000, 3))
    fed_cloud = circle(1.0, n).cloud

    def nnls_batch(mod):
        return lambda: [mod.nnls(g, v) for v in vs]

    return {
        "nnls x2000": nnls_batch,
        f"cone_residuals ({len(pi)} pairs)": lambda mod: lambda: mod.cone_residuals(cloud.points, gens, offsets, pi, pj, 0.0),
        f"pair_gaps ({len(pi)} pairs)": lambda mod: lambda: mod.pair_gaps(bases, pi, pj),
        f"federer_reach (circle n={n})": lambda mod: _end_to_end(mod, fed_cloud),
    }


def _end_to_end(mod, cloud):
    def run():
        _backend.use("compiled" if mod is not _pykernels else "python")
        federer_reach(cloud, h=0.2)
    return run


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n", type=int, default=512)
    args = parser.parse_args(argv)
    if "compiled" not in _backend.available():
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    from reachkit import _ckernels

    start = _backend.name()
    print(f"{'kernel':<36}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    try:
        for name, make in cases(args.n).items():
            tc = best_of(make(_ckernels), args.repeat)
            tp = best_of(make(_pykernels), args.repeat)
            print(f"{name:<36}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    finally:
        _backend.use(start)


if __name__ == "__main__":
    main()
