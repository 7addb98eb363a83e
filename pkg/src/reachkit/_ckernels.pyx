# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the pairwise kernels in ``_pykernels``."""

import numpy as np

from libc.math cimport sqrt, INFINITY, NAN
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cdef double NNLS_TOL = 1e-12
cdef double DEPENDENT_TOL = 1e-10


cdef struct Work:
    char* passive
    char* blocked
    int* idx
    double* w
    double* x
    double* z
    double* q
    double* r
    double* col
    double* v


cdef int _alloc(Work* wk, int m, int d) noexcept nogil:
    if m < 1:
        m = 1
    wk.passive = <char*>malloc(m)
    wk.blocked = <char*>malloc(m)
    wk.idx = <int*>malloc(m * sizeof(int))
    wk.w = <double*>malloc(m * sizeof(double))
    wk.x = <double*>malloc(m * sizeof(double))
    wk.z = <double*>malloc((d + 1) * sizeof(double))
    wk.q = <double*>malloc((d + 1) * d * sizeof(double))
    wk.r = <double*>malloc((d + 1) * (d + 1) * sizeof(double))
    wk.col = <double*>malloc(d * sizeof(double))
    wk.v = <double*>malloc(d * sizeof(double))
    return wk.passive != NULL and wk.blocked != NULL and wk.idx != NULL and wk.w != NULL \
        and wk.x != NULL and wk.z != NULL and wk.q != NULL and wk.r != NULL \
        and wk.col != NULL and wk.v != NULL


cdef void _release(Work* wk) noexcept nogil:
    free(wk.passive)
    free(wk.blocked)
    free(wk.idx)
    free(wk.w)
    free(wk.x)
    free(wk.z)
    free(wk.q)
    free(wk.r)
    free(wk.col)
    free(wk.v)


cdef int _solve_passive(const double* g, int d, int p, Work* wk) noexcept nogil:
    # g is row-major (m x d): generator k starts at g + k * d
    cdef int c, c2, i, rep
    cdef double dot, nrm
    cdef double* col = wk.col
    cdef double* q = wk.q
    cdef double* r = wk.r
    cdef double* z = wk.z
    if p > d:
        return 0
    memset(r, 0, p * p * sizeof(double))
    for c in range(p):
        for i in range(d):
            col[i] = g[wk.idx[c] * d + i]
        for rep in range(2):
            for c2 in range(c):
                dot = 0.0
                for i in range(d):
                    dot += q[c2 * d + i] * col[i]
                r[c2 * p + c] += dot
                for i in range(d):
                    col[i] -= dot * q[c2 * d + i]
        nrm = 0.0
        for i in range(d):
            nrm += col[i] * col[i]
        nrm = sqrt(nrm)
        if nrm <= DEPENDENT_TOL:
            return 0
        r[c * p + c] = nrm
        for i in range(d):
            q[c * d + i] = col[i] / nrm
    for c in range(p):
        dot = 0.0
        for i in range(d):
            dot += q[c * d + i] * wk.v[i]
        z[c] = dot
    for c in range(p - 1, -1, -1):
        dot = z[c]
        for c2 in range(c + 1, p):
            dot -= r[c * p + c2] * z[c2]
        z[c] = dot / r[c * p + c]
    return 1


cdef void _dual(const double* g, int d, int m, Work* wk) noexcept nogil:
    # w = g^T (v - g x)
    cdef int k, i
    cdef double s
    for i in range(d):
        wk.col[i] = wk.v[i]
    for k in range(m):
        if wk.x[k] != 0.0:
            for i in range(d):
                wk.col[i] -= g[k * d + i] * wk.x[k]
    for k in range(m):
        s = 0.0
        for i in range(d):
            s += g[k * d + i] * wk.col[i]
        wk.w[k] = s


cdef double _nnls(const double* g, int d, int m, double tol, Work* wk) noexcept nogil:
    """Distance from wk.v to the cone spanned by the m rows of g."""
    cdef int k, c, j, p, it, first, changed, ok, leave, any_passive, jpos
    cdef double scale = 0.0, thresh, best, alpha, ratio, xi, s
    for k in range(m):
        wk.x[k] = 0.0
    for k in range(d):
        scale += wk.v[k] * wk.v[k]
    scale = sqrt(scale)
    if m == 0 or scale == 0.0:
        return scale
    thresh = tol * scale
    memset(wk.passive, 0, m)
    memset(wk.blocked, 0, m)
    _dual(g, d, m, wk)
    for it in range(10 * m):
        j = -1
        best = -INFINITY
        for k in range(m):
            if not wk.passive[k] and not wk.blocked[k] and wk.w[k] > best:
                best = wk.w[k]
                j = k
        if j < 0 or best <= thresh:
            break
        wk.passive[j] = 1
        changed = 0
        first = 1
        while True:
            p = 0
            jpos = -1
            for k in range(m):
                if wk.passive[k]:
                    if k == j:
                        jpos = p
                    wk.idx[p] = k
                    p += 1
            ok = _solve_passive(g, d, p, wk)
            if first and (not ok or wk.z[jpos] <= 0.0):
                wk.passive[j] = 0
                wk.blocked[j] = 1
                break
            first = 0
            if not ok:
                break
            leave = -1
            for c in range(p):
                if wk.z[c] <= 0.0:
                    leave = c
                    break
            if leave < 0:
                for k in range(m):
                    wk.x[k] = 0.0
                for c in range(p):
                    wk.x[wk.idx[c]] = wk.z[c]
                changed = 1
                break
            alpha = INFINITY
            for c in range(p):
                if wk.z[c] <= 0.0:
                    xi = wk.x[wk.idx[c]]
                    ratio = xi / (xi - wk.z[c])
                    if ratio < alpha:
                        alpha = ratio
                        leave = c
            for c in range(p):
                xi = wk.x[wk.idx[c]]
                wk.x[wk.idx[c]] = xi + alpha * (wk.z[c] - xi)
            wk.x[wk.idx[leave]] = 0.0
            any_passive = 0
            for c in range(p):
                if wk.x[wk.idx[c]] <= 0.0:
                    wk.passive[wk.idx[c]] = 0
                    wk.x[wk.idx[c]] = 0.0
                else:
                    any_passive = 1
            changed = 1
            if not any_passive:
                break
        if changed:
            memset(wk.blocked, 0, m)
            _dual(g, d, m, wk)
    # residual
    s = 0.0
    for c in range(d):
        xi = wk.v[c]
        for k in range(m):
            if wk.x[k] != 0.0:
                xi -= g[k * d + c] * wk.x[k]
        s += xi * xi
    return sqrt(s)


def nnls(g, v, double tol=NNLS_TOL):
    """Same contract as ``_pykernels.nnls``; ``g`` is (d, m) with generator columns."""
    cdef const double[:, ::1] gt = np.ascontiguousarray(np.asarray(g, dtype=np.float64).T)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef int m = gt.shape[0]
    cdef int d = vv.shape[0]
    cdef Work wk
    cdef double res
    cdef int k
    if not _alloc(&wk, m, d):
        _release(&wk)
        raise MemoryError()
    for k in range(d):
        wk.v[k] = vv[k]
    res = _nnls(&gt[0, 0] if m > 0 else NULL, d, m, tol, &wk)
    x = np.zeros(m)
    for k in range(m):
        x[k] = wk.x[k]
    _release(&wk)
    return x, res


def cone_residuals(points, gens, offsets, pi, pj, double h_min):
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] gg = np.ascontiguousarray(gens, dtype=np.float64).reshape(-1, pts.shape[1])
    cdef const long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const long long[::1] ii = np.ascontiguousarray(pi, dtype=np.int64)
    cdef const long long[::1] jj = np.ascontiguousarray(pj, dtype=np.int64)
    cdef Py_ssize_t npairs = ii.shape[0]
    cdef int d = pts.shape[1]
    out_arr = np.empty(npairs)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t t
    cdef long long a, b
    cdef int k, m, mmax = 0
    cdef double e2
    cdef Work wk
    for k in range(off.shape[0] - 1):
        if off[k + 1] - off[k] > mmax:
            mmax = <int>(off[k + 1] - off[k])
    if not _alloc(&wk, mmax, d):
        _release(&wk)
        raise MemoryError()
    with nogil:
        for t in range(npairs):
            a = ii[t]
            b = jj[t]
            e2 = 0.0
            for k in range(d):
                wk.v[k] = pts[b, k] - pts[a, k]
                e2 += wk.v[k] * wk.v[k]
            if sqrt(e2) < h_min:
                out[t] = NAN
                continue
            m = <int>(off[a + 1] - off[a])
            if m == 0:
                out[t] = sqrt(e2)
            else:
                out[t] = _nnls(&gg[off[a], 0], d, m, NNLS_TOL, &wk)
    _release(&wk)
    return out_arr


def pair_gaps(bases, pi, pj):
    """Gap distances for stacks of orthonormal bases with k in {0, 1, 2}."""
    cdef const double[:, :, ::1] bb = np.ascontiguousarray(bases, dtype=np.float64)
    cdef const long long[::1] ii = np.ascontiguousarray(pi, dtype=np.int64)
    cdef const long long[::1] jj = np.ascontiguousarray(pj, dtype=np.int64)
    cdef int d = bb.shape[1]
    cdef int kdim = bb.shape[2]
    cdef Py_ssize_t npairs = ii.shape[0], t
    cdef long long a, b
    cdef int i, c, c2
    cdef double dot, s11, s12, s22, half, r0, r1
    cdef double coef[2][2]
    if kdim > 2:
        raise ValueError("compiled pair_gaps handles subspace dimension <= 2")
    out_arr = np.zeros(npairs)
    cdef double[::1] out = out_arr
    if kdim == 0:
        return out_arr
    with nogil:
        for t in range(npairs):
            a = ii[t]
            b = jj[t]
            # coef = V^T U
            for c in range(kdim):
                for c2 in range(kdim):
                    dot = 0.0
                    for i in range(d):
                        dot += bb[b, i, c] * bb[a, i, c2]
                    coef[c][c2] = dot
            s11 = 0.0
            s12 = 0.0
            s22 = 0.0
            for i in range(d):
                # residual (U - V coef) columns
                r0 = bb[a, i, 0]
                for c in range(kdim):
                    r0 -= bb[b, i, c] * coef[c][0]
                s11 += r0 * r0
                if kdim == 2:
                    r1 = bb[a, i, 1]
                    for c in range(kdim):
                        r1 -= bb[b, i, c] * coef[c][1]
                    s12 += r0 * r1
                    s22 += r1 * r1
            if kdim == 1:
                out[t] = sqrt(s11)
            else:
                half = 0.5 * (s11 - s22)
                out[t] = sqrt(0.5 * (s11 + s22) + sqrt(half * half + s12 * s12))
    return out_arr
