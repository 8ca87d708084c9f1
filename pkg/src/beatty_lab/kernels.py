"""Kernel selection and the exact-phase exponential sum driver.

The compiled backend is used when importable; set ``BEATTY_LAB_PURE=1`` to force
the numpy fallback.  Both expose ``phase_words`` and ``phase_sums``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels
from .errors import InputError, PrecisionExhausted
from .irrational import FIXED_BITS, RealParam, fixed_point_frac

_MASK64 = (1 << 64) - 1
_ONE = 1 << FIXED_BITS
PHASE_TOL = 1e-15
THREADS_ENV = "BEATTY_LAB_THREADS"


def _load():
    if os.environ.get("BEATTY_LAB_PURE", "") not in ("", "0"):
        return _pykernels
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels
    return _ckernels


backend = _load()
BACKEND = backend.BACKEND


def default_threads():
    raw = os.environ.get(THREADS_ENV, "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def split_word(w):
    return (w >> 64) & _MASK64, w & _MASK64


def theta_word(theta: RealParam, scale_max: int):
    """128-bit word of frac(theta); refuses if scale_max * radius exceeds the phase budget."""
    w, rad = fixed_point_frac(theta)
    if rad and scale_max * rad > PHASE_TOL:
        raise PrecisionExhausted(
            f"theta radius {rad:.3g} times |l|*N = {scale_max} exceeds {PHASE_TOL:g}")
    return w


def weighted_exp_sums(ns, ws, theta: RealParam, ls, threads=None, kern=None):
    """sum_j ws[j] e(l * ns[j] * theta) for each l in ``ls``; returns complex array.

    l*theta is reduced mod 1 exactly before reaching the kernel.  Work is split over
    l only, so every entry is independent of the thread count.
    """
    kern = kern or backend
    ns = np.ascontiguousarray(ns, dtype=np.int64)
    ls = [int(l) for l in ls]
    if len(ns) and ns.min() < 0:
        raise InputError("kernel indices must be non-negative")
    scale = max((abs(l) for l in ls), default=0) * (int(ns.max()) if len(ns) else 0)
    w = theta_word(theta, scale)
    words = [split_word((l * w) % _ONE) for l in ls]
    his = np.array([h for h, _ in words], dtype=np.uint64)
    los = np.array([lo for _, lo in words], dtype=np.uint64)
    nu = ns.view(np.uint64)
    threads = threads or default_threads()
    if threads <= 1 or len(ls) < 2:
        re, im = kern.phase_sums(nu, ws, his, los)
    else:
        chunks = np.array_split(np.arange(len(ls)), min(threads, len(ls)))
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda c: kern.phase_sums(nu, ws, his[c], los[c]), chunks))
        re = np.concatenate([p[0] for p in parts])
        im = np.concatenate([p[1] for p in parts])
    return re + 1j * im
