"""Beatty sequences B(alpha, beta) = {floor(n alpha + beta) : n >= 1}.

Membership uses the fractional-part criterion

    m in B  <=>  || m/alpha + (1 - 2 beta)/(2 alpha) || < 1/(2 alpha)   (m > alpha + beta - 1)

decided exactly for surds.  Batch versions work on 128-bit fixed-point words and
fall back to exact arithmetic whenever a word lands within a few ulps of a boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

import numpy as np

from . import kernels
from .errors import ConstructionFailed, InputError, RationalParameterError
from .irrational import (FIXED_BITS, IncompatibleSurds, RealParam, Surd, as_real,
                         certified_less, decide, dist_nearest_int, fixed_point_frac,
                         floor_linear, to_interval)

_TWO64 = 1 << 64
_MARGIN = 16
_MAX_BATCH_N = 1 << 50


def _eval(f, *vals):
    """f(*vals) exactly; surds from different fields are combined on tight enclosures."""
    try:
        return f(*vals)
    except IncompatibleSurds:
        return f(*(to_interval(v, 512) for v in vals))


@dataclass(frozen=True)
class BeattyParams:
    alpha: RealParam
    beta: RealParam = field(default_factory=lambda: Surd.rational(0))
    verified_irrational: bool = field(init=False, default=True)

    def __post_init__(self):
        a, b = as_real(self.alpha), as_real(self.beta)
        if isinstance(a, Surd) and a.is_rational:
            raise RationalParameterError("alpha must be irrational (got a rational value)")
        if not certified_less(0, a):
            raise InputError("alpha must be positive")
        if certified_less(b, 0):
            raise InputError("beta must be non-negative")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "verified_irrational", isinstance(a, Surd))

    @property
    def B(self):
        """max(1, beta)."""
        return self.beta if certified_less(1, self.beta) else Surd.rational(1)

    def small_m_cutoff(self) -> int:
        """Largest integer m with m <= alpha + beta - 1 (the criterion needs m above it)."""
        return decide(lambda a, b: (a + b - 1).floor(), (self.alpha, self.beta))


def witness_member(m: int, params: BeattyParams) -> bool:
    """Direct test: m in B iff floor(n alpha + beta) = m for n = max(1, ceil((m - beta)/alpha))."""
    a, b = params.alpha, params.beta
    n = max(1, decide(lambda a_, b_: ((m - b_) / a_).ceil(), (a, b)))
    return floor_linear(n, a, b) == m


def norm_criterion(m: int, params: BeattyParams) -> bool:
    """|| m/alpha + (1-2beta)/(2alpha) || < 1/(2alpha), strict, decided exactly for surds."""
    def compute(a, b):
        x = (m + Fraction(1, 2) - b) / a
        d = dist_nearest_int(x)
        return ((a * 2).inverse() - d).sign() > 0
    return decide(compute, (params.alpha, params.beta))


def is_member(m: int, params: BeattyParams) -> bool:
    """Membership of m in B(alpha, beta).

    Above alpha + beta - 1 the norm criterion decides and is cross-checked against the
    floor witness; at or below it only the witness applies.
    """
    if m < 1:
        raise InputError("m must be >= 1")
    direct = witness_member(m, params)
    if m <= params.small_m_cutoff():
        return direct
    crit = norm_criterion(m, params)
    if crit != direct:
        raise ConstructionFailed(f"membership tests disagree at m={m}")
    return crit


class _MemberWords:
    """Precomputed fixed-point data for the batch norm criterion."""

    def __init__(self, params: BeattyParams):
        a, b = params.alpha, params.beta
        inv = _eval(lambda x: x.inverse(), a)
        c = _eval(lambda x, y: (Fraction(1, 2) - y) / x, a, b)
        self.w_inv, self.r_inv = fixed_point_frac(inv)
        self.w_c, self.r_c = fixed_point_frac(c)
        self.small = params.small_m_cutoff()
        # threshold 2^64/(2 alpha) as an integer floor; alpha < 1 means every m qualifies
        self.everything = certified_less(a, 1)
        if not self.everything:
            self.T = decide(lambda x: ((x * 2).inverse() * _TWO64).floor(), (a,))

    def classify(self, m: np.ndarray):
        """(+1 member, 0 non-member, -1 undecided) for each m."""
        m = np.asarray(m, dtype=np.int64)
        out = np.full(m.shape, -1, dtype=np.int8)
        if self.everything:
            out[:] = 1
            out[m <= self.small] = -1
            return out
        hi, lo = divmod(self.w_inv, _TWO64)
        c_hi, c_lo = divmod(self.w_c, _TWO64)
        words = kernels.backend.phase_words(m.view(np.uint64), hi, lo, c_hi, c_lo)
        s = words.view(np.int64)
        dist = np.abs(s)
        dist[dist < 0] = np.iinfo(np.int64).max
        slack = _MARGIN + (m.astype(np.float64) * self.r_inv + self.r_c) * 2.0**64
        T = float(self.T)
        distf = dist.astype(np.float64)
        out[distf + slack < T] = 1
        out[distf - slack > T] = 0
        out[m <= self.small] = -1
        return out


def member_mask(ms, params: BeattyParams) -> np.ndarray:
    """Vectorized membership; undecided or small entries go through :func:`is_member`."""
    ms = np.asarray(ms, dtype=np.int64)
    if ms.size and ms.min() < 1:
        raise InputError("m must be >= 1")
    cls = _MemberWords(params).classify(ms)
    out = cls == 1
    for i in np.flatnonzero(cls < 0):
        out[i] = is_member(int(ms[i]), params)
    return out


def beatty_floors(n_lo: int, n_hi: int, params: BeattyParams) -> np.ndarray:
    """floor(n alpha + beta) for n_lo <= n <= n_hi as int64."""
    if n_lo < 1 or n_hi < n_lo:
        return np.zeros(0, dtype=np.int64)
    if n_hi > _MAX_BATCH_N:
        return np.array([floor_linear(n, params.alpha, params.beta) for n in range(n_lo, n_hi + 1)],
                        dtype=np.int64)
    a, b = params.alpha, params.beta
    fa_int = decide(lambda x: x.floor(), (a,))
    fb_int = decide(lambda x: x.floor(), (b,))
    wa, ra = fixed_point_frac(a)
    wb, rb = fixed_point_frac(b)
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    hi, lo = divmod(wa, _TWO64)
    b_hi, b_lo = divmod(wb, _TWO64)
    words = kernels.backend.phase_words(n.view(np.uint64), hi, lo, b_hi, b_lo)
    frac = words.astype(np.float64) / 2.0**64
    approx = n.astype(np.float64) * (wa / 2.0**FIXED_BITS) + wb / 2.0**FIXED_BITS
    k = np.rint(approx - frac).astype(np.int64)
    out = n * fa_int + fb_int + k
    slack = _MARGIN + (n.astype(np.float64) * ra + rb) * 2.0**64
    wf = words.astype(np.float64)
    risky = (wf < slack) | (wf > 2.0**64 - slack)
    for i in np.flatnonzero(risky):
        out[i] = floor_linear(int(n[i]), a, b)
    return out


def enumerate_members(N: int, params: BeattyParams) -> List[int]:
    """All members <= N in increasing order."""
    if N < 1:
        return []
    n_max = decide(lambda a, b: ((N + 1 - b) / a).floor(), (params.alpha, params.beta)) + 1
    vals = beatty_floors(1, max(1, n_max), params)
    vals = vals[vals <= N]
    # floor(n alpha + beta) is non-decreasing; alpha < 1 repeats values
    return [int(v) for v in np.unique(vals)]


def count_members(N: int, params: BeattyParams) -> int:
    return len(enumerate_members(N, params))


def chi_delta(theta: RealParam, delta) -> int:
    """1 if ||theta|| < delta else 0."""
    d = as_real(delta)
    if not (certified_less(0, d) and not certified_less(Fraction(1, 2), d)):
        raise InputError("delta must satisfy 0 < delta <= 1/2")
    return int(certified_less(dist_nearest_int(as_real(theta)), d))


# sandwich polynomials -------------------------------------------------------

def _selberg_phi(t):
    t = np.asarray(t, dtype=np.float64)
    return np.pi * t * (1 - t) / np.tan(np.pi * t) + t


def _coeff_bound(delta, L, k):
    return np.minimum(2 * delta + 1.0 / (L + 1), 1.5 / k)


GRID_POINTS = 10_000
SANDWICH_TOL = 1e-12


@dataclass(frozen=True)
class SandwichPolys:
    """Trigonometric polynomials of degree L with lower <= chi_delta <= upper.

    Both are a0 + sum_{1<=|l|<=L} C_l e(l theta) with real, even coefficients, so
    c(-l) = c(l) and evaluation reduces to a0 + 2 sum_l C_l cos(2 pi l theta).
    """

    delta: float
    L: int
    c_minus: np.ndarray
    c_plus: np.ndarray

    @property
    def a0_minus(self):
        return 2 * self.delta - 1.0 / (self.L + 1)

    @property
    def a0_plus(self):
        return 2 * self.delta + 1.0 / (self.L + 1)

    def _eval(self, a0, c, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        ks = np.arange(1, self.L + 1)
        return a0 + 2 * np.cos(2 * np.pi * np.outer(theta, ks)) @ c

    def lower(self, theta):
        return self._eval(self.a0_minus, self.c_minus, theta)

    def upper(self, theta):
        return self._eval(self.a0_plus, self.c_plus, theta)

    def coefficient_bound(self):
        return _coeff_bound(self.delta, self.L, np.arange(1, self.L + 1))

    def validation_grid(self):
        d = self.delta
        edges = [s * d + e for s in (-1, 1) for e in (-1e-9, 0.0, 1e-9)]
        base = np.linspace(-0.5, 0.5, GRID_POINTS - len(edges), endpoint=False)
        return np.concatenate([base, edges])

    def violations(self):
        """(sandwich violations, coefficient violations) on the validation grid."""
        th = self.validation_grid()
        chi = (np.abs(th - np.rint(th)) < self.delta).astype(np.float64)
        bad = int(np.sum(self.lower(th) > chi + SANDWICH_TOL) + np.sum(self.upper(th) < chi - SANDWICH_TOL))
        bound = self.coefficient_bound()
        cbad = int(np.sum(np.abs(self.c_minus) > bound) + np.sum(np.abs(self.c_plus) > bound))
        return bad, cbad


def sandwich_polys(delta: float, L: int) -> SandwichPolys:
    """Selberg-Vaaler minorant/majorant of the indicator of (-delta, delta) mod 1."""
    delta = float(delta)
    if not 0 < delta < 0.5:
        raise InputError("delta must satisfy 0 < delta < 1/2")
    if L < 1:
        raise InputError("L must be >= 1")
    k = np.arange(1, L + 1, dtype=np.float64)
    smooth = _selberg_phi(k / (L + 1)) * np.sin(2 * np.pi * k * delta) / (np.pi * k)
    fejer = (1 - k / (L + 1)) * np.cos(2 * np.pi * k * delta) / (L + 1)
    polys = SandwichPolys(delta, L, smooth - fejer, smooth + fejer)
    bad, cbad = polys.violations()
    if bad or cbad:
        raise ConstructionFailed(f"sandwich check failed: {bad} pointwise, {cbad} coefficient violations")
    return polys


def discrepancy(points) -> float:
    """Extreme discrepancy sup_I |#{x_i in I}/M - |I|| over subintervals of [0, 1)."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    M = len(x)
    if M == 0:
        raise InputError("points must be non-empty")
    if x[0] < 0 or x[-1] >= 1:
        raise InputError("points must lie in [0, 1)")
    i = np.arange(1, M + 1) / M
    diff = i - x
    return float(1.0 / M + diff.max() - diff.min())


def frac_points(alpha: RealParam, count: int, beta: RealParam = 0) -> np.ndarray:
    """{n alpha + beta} for n = 1..count, from exact fixed-point words."""
    wa, _ = fixed_point_frac(alpha)
    wb, _ = fixed_point_frac(beta)
    n = np.arange(1, count + 1, dtype=np.uint64)
    hi, lo = divmod(wa, _TWO64)
    bh, bl = divmod(wb, _TWO64)
    return kernels.backend.phase_words(n, hi, lo, bh, bl).astype(np.float64) / 2.0**64 % 1.0
