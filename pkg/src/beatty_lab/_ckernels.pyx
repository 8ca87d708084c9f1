# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: 128-bit fixed-point phases and compensated trigonometric sums."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, fabs, M_PI

cnp.import_array()

BACKEND = "cython"

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef double TWO_PI_2_64 = 2.0 * M_PI / 18446744073709551616.0


cdef inline u64 top_word(u64 n, u128 w, u128 c) noexcept nogil:
    return <u64>((<u128>n * w + c) >> 64)


def phase_words(ns, hi, lo, c_hi=0, c_lo=0):
    cdef const u64[::1] nv = np.ascontiguousarray(ns, dtype=np.uint64)
    cdef Py_ssize_t i, m = nv.shape[0]
    cdef u128 w = ((<u128><u64>hi) << 64) | <u64>lo
    cdef u128 c = ((<u128><u64>c_hi) << 64) | <u64>c_lo
    out = np.empty(m, dtype=np.uint64)
    cdef u64[::1] ov = out
    with nogil:
        for i in range(m):
            ov[i] = top_word(nv[i], w, c)
    return out


cdef inline void neumaier(double *s, double *comp, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


def phase_sums(ns, ws, his, los):
    cdef const u64[::1] nv = np.ascontiguousarray(ns, dtype=np.uint64)
    cdef const double[::1] wv = np.ascontiguousarray(ws, dtype=np.float64)
    cdef const u64[::1] hv = np.ascontiguousarray(his, dtype=np.uint64)
    cdef const u64[::1] lv = np.ascontiguousarray(los, dtype=np.uint64)
    cdef Py_ssize_t i, j, m = nv.shape[0], k = hv.shape[0]
    cdef u128 w
    cdef double ang, sr, cr, si, ci
    re = np.empty(k)
    im = np.empty(k)
    cdef double[::1] rv = re, iv = im
    with nogil:
        for j in range(k):
            w = ((<u128>hv[j]) << 64) | lv[j]
            sr = cr = si = ci = 0.0
            for i in range(m):
                ang = <double><i64>top_word(nv[i], w, 0) * TWO_PI_2_64
                neumaier(&sr, &cr, wv[i] * cos(ang))
                neumaier(&si, &ci, wv[i] * sin(ang))
            rv[j] = sr + cr
            iv[j] = si + ci
    return re, im
