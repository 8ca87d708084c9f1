"""Pure numpy kernels; the compiled module in ``_ckernels.pyx`` mirrors these signatures.

Phases are 128-bit fixed-point words: theta is stored as w = floor(frac(theta) 2^128)
split into (hi, lo) 64-bit halves, and the phase of n*theta is the top 64 bits of
n*w mod 2^128.  That product is computed exactly, so large n lose no phase accuracy.
"""

import math

import numpy as np

BACKEND = "numpy"

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_TWO_PI_2_64 = 2.0 * math.pi / 2.0**64


def _mulhi(a, b):
    """High 64 bits of a*b for uint64 arrays (b may be a scalar)."""
    a0, a1 = a & _M32, a >> _S32
    b = np.uint64(b)
    b0, b1 = b & _M32, b >> _S32
    p00, p01, p10, p11 = a0 * b0, a0 * b1, a1 * b0, a1 * b1
    mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
    return p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)


def phase_words(ns, hi, lo, c_hi=0, c_lo=0):
    """Top word of (n*w + c) mod 2^128 for every n, with w = hi:lo and c = c_hi:c_lo."""
    ns = np.ascontiguousarray(ns, dtype=np.uint64)
    with np.errstate(over="ignore"):
        low = ns * np.uint64(lo)
        top = ns * np.uint64(hi) + _mulhi(ns, lo)
        if c_lo or c_hi:
            s = low + np.uint64(c_lo)
            carry = (s < low).astype(np.uint64)
            top = top + np.uint64(c_hi) + carry
    return top


def phase_sums(ns, ws, his, los):
    """For each word (hi, lo): sum_j ws[j] * e(ns[j] * w), returned as (re, im) arrays.

    Accumulation uses math.fsum, so each value is the correctly rounded sum of the
    rounded terms and does not depend on chunking or thread scheduling.
    """
    ns = np.ascontiguousarray(ns, dtype=np.uint64)
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    k = len(his)
    re, im = np.empty(k), np.empty(k)
    for j in range(k):
        ang = phase_words(ns, int(his[j]), int(los[j])).view(np.int64) * _TWO_PI_2_64
        re[j] = math.fsum(ws * np.cos(ang))
        im[j] = math.fsum(ws * np.sin(ang))
    return re, im
