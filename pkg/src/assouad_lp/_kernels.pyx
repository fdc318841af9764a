# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ball-mass kernels.

Same contracts as ``_kernels_py``; the block kernel locates the blocks that
meet a ball by binary search instead of scanning all of them.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, expm1, log1p, fabs, INFINITY

cnp.import_array()

cdef double LOG2 = log(2.0)
cdef double POINT_RADIUS = 2.0 ** -900


cdef inline double _logaddexp(double a, double b) noexcept nogil:
    cdef double m
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    m = a if a > b else b
    return m + log1p(exp(-fabs(a - b)))


cdef inline double _fmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef _offsets(x, offset):
    if offset is None:
        return np.zeros(x.shape[0], dtype=np.float64)
    return np.ascontiguousarray(np.broadcast_to(np.asarray(offset, dtype=np.float64),
                                                np.shape(x)), dtype=np.float64).ravel()


def segment_log_ball(xs, double r, lo, hi, anchor, sign, logc, alpha, offset=None):
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    cdef const double[::1] o = _offsets(xs, offset)
    cdef const double[::1] s_lo = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] s_hi = np.ascontiguousarray(hi, dtype=np.float64)
    cdef const double[::1] s_a = np.ascontiguousarray(anchor, dtype=np.float64)
    cdef const double[::1] s_sg = np.ascontiguousarray(sign, dtype=np.float64)
    cdef const double[::1] s_lc = np.ascontiguousarray(logc, dtype=np.float64)
    cdef const double[::1] s_al = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], m = s_lo.shape[0], i, j
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc, w, t_hi, beta, frac, tail, xi, oi, above, below
    with nogil:
        for i in range(n):
            xi = x[i]
            oi = o[i]
            acc = -INFINITY
            for j in range(m):
                if s_lc[j] == -INFINITY:
                    continue
                above = (s_hi[j] - xi) - oi
                below = (xi - s_lo[j]) + oi
                if above <= r and below <= r:
                    w = s_hi[j] - s_lo[j]
                else:
                    w = _fmin(above, r) + _fmin(below, r)
                if s_sg[j] > 0:
                    t_hi = _fmin(s_hi[j] - s_a[j], ((xi - s_a[j]) + oi) + r)
                else:
                    t_hi = _fmin(s_a[j] - s_lo[j], ((s_a[j] - xi) - oi) + r)
                if w <= 0 or t_hi <= 0:
                    continue
                w = _fmin(w, t_hi)
                beta = s_al[j] + 1.0
                frac = w / t_hi
                if frac < 1.0:
                    tail = log(-expm1(beta * log1p(-frac)))
                else:
                    tail = 0.0
                acc = _logaddexp(acc, s_lc[j] - log(beta) + beta * log(t_hi) + tail)
            out[i] = acc
    return out_arr.reshape(np.shape(xs))


cdef inline double _overlap(double d, double r, double rho) noexcept nogil:
    # containment first: tiny plateaus keep 2 rho, tiny balls keep 2 r
    cdef double a = fabs(d)
    cdef double ov
    if a + rho <= r:
        return 2.0 * rho
    if a + r <= rho:
        return 2.0 * r
    ov = r + (rho - a)
    return ov if ov > 0 else 0.0


cdef inline double _plateau_log_overlap(double d, double r, double rho,
                                        double log_rho) noexcept nogil:
    cdef double ov
    if rho < POINT_RADIUS:
        if fabs(d) <= r:
            return LOG2 + log_rho
        return -INFINITY
    ov = _overlap(d, r, rho)
    if ov > 0:
        return log(ov)
    return -INFINITY


cdef inline Py_ssize_t _bisect_left(const double[::1] a, double v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _bisect_right(const double[::1] a, double v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if v < a[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


def block_log_ball(xs, double r, center, rho_in, rho_out, log_rho_in, log_rho_out,
                   log_h_in, log_h_out, left, right, offset=None):
    """Binary-search variant; ``left``/``right`` are the sorted block extents."""
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    cdef const double[::1] o = _offsets(xs, offset)
    cdef const double[::1] c = np.ascontiguousarray(center, dtype=np.float64)
    cdef const double[::1] ri = np.ascontiguousarray(rho_in, dtype=np.float64)
    cdef const double[::1] ro = np.ascontiguousarray(rho_out, dtype=np.float64)
    cdef const double[::1] lri = np.ascontiguousarray(log_rho_in, dtype=np.float64)
    cdef const double[::1] lhi = np.ascontiguousarray(log_h_in, dtype=np.float64)
    cdef const double[::1] lho = np.ascontiguousarray(log_h_out, dtype=np.float64)
    cdef const double[::1] bl = np.ascontiguousarray(left, dtype=np.float64)
    cdef const double[::1] br = np.ascontiguousarray(right, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], k = c.shape[0], i, j, j0, j1
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double d, l_in, l_ann, ann, term, top, s, xi
    # per-call scratch for the terms of the hit range
    scratch_arr = np.empty(k if k > 0 else 1, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    with nogil:
        for i in range(n):
            xi = x[i]
            # one extra block either side absorbs rounding in the extents
            j0 = _bisect_left(br, (xi + o[i]) - r) - 1
            j1 = _bisect_right(bl, (xi + o[i]) + r) + 1
            if j0 < 0:
                j0 = 0
            if j1 > k:
                j1 = k
            top = -INFINITY
            for j in range(j0, j1):
                d = (xi - c[j]) + o[i]
                l_in = _plateau_log_overlap(d, r, ri[j], lri[j])
                ann = _overlap(d, r, ro[j]) - _overlap(d, r, ri[j])
                l_ann = log(ann) if ann > 0 else -INFINITY
                term = _logaddexp(lhi[j] + l_in, lho[j] + l_ann)
                scratch[j] = term
                if term > top:
                    top = term
            if top == -INFINITY:
                out[i] = -INFINITY
                continue
            s = 0.0
            for j in range(j0, j1):
                s += exp(scratch[j] - top)
            out[i] = top + log(s)
    return out_arr.reshape(np.shape(xs))
