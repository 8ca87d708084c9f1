"""Segmented sieve, von Mangoldt values and Chebyshev sums.

Sums of logarithms go through :func:`math.fsum`, which is exactly rounded, so
theta/psi values do not depend on summation order or segment scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityExceeded, InputError

SEGMENT = 1 << 20
MAX_SPAN = 2 * 10**9


@dataclass(frozen=True)
class APClass:
    """Residue class n = f (mod d); d == 1 means no restriction."""

    d: int = 1
    f: int = 0

    def __post_init__(self):
        d, f = int(self.d), int(self.f)
        if d < 1:
            raise InputError("d must be >= 1")
        if d == 1:
            f = 0
        elif not (1 <= f < d and math.gcd(f, d) == 1):
            raise InputError("f must satisfy 1 ≤ f < d, gcd(f,d)=1")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "f", f)

    def mask(self, n):
        n = np.asarray(n)
        if self.d == 1:
            return np.ones(n.shape, dtype=bool)
        return n % self.d == self.f

    def coprime_residues(self):
        return [f for f in range(1, self.d) if math.gcd(f, self.d) == 1] if self.d > 1 else [0]


@dataclass(frozen=True)
class PrimeTable:
    lo: int
    hi: int
    flags: np.ndarray

    def primes(self):
        return np.flatnonzero(self.flags).astype(np.int64) + self.lo

    def __contains__(self, m):
        return self.lo <= m <= self.hi and bool(self.flags[m - self.lo])


def _small_primes(limit):
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _mark_segment(lo, hi, base):
    seg = np.ones(hi - lo + 1, dtype=bool)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, -(-lo // p) * p)
        seg[start - lo::p] = False
    if lo <= 1:
        seg[:2 - lo] = False
    return seg


def sieve(lo: int, hi: int, threads: int = 1) -> PrimeTable:
    """Primality flags on [lo, hi], segment by segment."""
    if lo < 2 or hi < lo:
        raise InputError("sieve needs 2 <= lo <= hi")
    if hi - lo > MAX_SPAN:
        raise CapacityExceeded(f"sieve span {hi - lo} exceeds {MAX_SPAN}")
    base = _small_primes(math.isqrt(hi))
    bounds = [(a, min(a + SEGMENT - 1, hi)) for a in range(lo, hi + 1, SEGMENT)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda b: _mark_segment(b[0], b[1], base), bounds))
    else:
        parts = [_mark_segment(a, b, base) for a, b in bounds]
    return PrimeTable(lo, hi, np.concatenate(parts))


@lru_cache(maxsize=8)
def primes_upto(N: int) -> np.ndarray:
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    out = sieve(2, N).primes()
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def prime_powers_upto(N: int):
    """(n, log p) for every prime power p^k <= N, sorted by n."""
    ps = primes_upto(N)
    ns, ws = [ps], [np.log(ps.astype(np.float64))]
    k = 2
    while 2**k <= N:
        root = math.isqrt(N) if k == 2 else int(round(N ** (1.0 / k))) + 1
        base = ps[ps <= root]
        pw = base**k
        keep = pw <= N
        ns.append(pw[keep])
        ws.append(np.log(base[keep].astype(np.float64)))
        k += 1
    n = np.concatenate(ns)
    w = np.concatenate(ws)
    order = np.argsort(n, kind="stable")
    n, w = n[order], w[order]
    n.setflags(write=False)
    w.setflags(write=False)
    return n, w


def von_mangoldt(n: int) -> float:
    if n < 1:
        raise InputError("n must be >= 1")
    if n == 1:
        return 0.0
    p = next((d for d in range(2, math.isqrt(n) + 1) if n % d == 0), n)
    while n % p == 0:
        n //= p
    return math.log(p) if n == 1 else 0.0


def chebyshev_theta(N: int, ap: APClass = APClass()) -> float:
    """Sum of log p over primes p <= N in the class ap."""
    if N < 2:
        return 0.0
    ps = primes_upto(N)
    ps = ps[ap.mask(ps)]
    return math.fsum(np.log(ps.astype(np.float64)))


def chebyshev_psi(N: int, ap: APClass = APClass()) -> float:
    """Sum of Lambda(n) over n <= N in the class ap."""
    if N < 2:
        return 0.0
    n, w = prime_powers_upto(N)
    return math.fsum(w[ap.mask(n)])


def prime_power_tail(N: int, ap: APClass = APClass()) -> float:
    """Sum of log p over p^k <= N with k >= 2 (and p^k in the class ap)."""
    if N < 4:
        return 0.0
    n, w = prime_powers_upto(N)
    keep = ap.mask(n) & ~np.isin(n, primes_upto(N))
    return math.fsum(w[keep])


@dataclass(frozen=True)
class ConstantsReport:
    N: int
    theta: float
    psi: float
    tail: float
    theta_lower: float
    psi_upper: float
    tail_upper: float
    theta_ok: bool
    psi_ok: bool
    tail_ok: bool

    @property
    def all_ok(self):
        return self.theta_ok and self.psi_ok and self.tail_ok


def check_explicit_constants(N: int) -> ConstantsReport:
    """theta(N) > N - N/log N, psi(N) <= 1.04 N, prime-power tail <= 1.0012 (sqrt N + N^(1/3))."""
    if N < 41:
        raise InputError("the theta inequality is only claimed for N >= 41")
    theta, psi, tail = chebyshev_theta(N), chebyshev_psi(N), prime_power_tail(N)
    theta_lower = N - N / math.log(N)
    psi_upper = 1.04 * N
    tail_upper = 1.0012 * (math.sqrt(N) + N ** (1.0 / 3.0))
    return ConstantsReport(N, theta, psi, tail, theta_lower, psi_upper, tail_upper,
                           theta > theta_lower, psi <= psi_upper, tail <= tail_upper)


@lru_cache(maxsize=8)
def mobius_upto(M: int) -> np.ndarray:
    mu = np.ones(M + 1, dtype=np.int64)
    mu[0] = 0
    for p in _small_primes(M):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    mu.setflags(write=False)
    return mu


@lru_cache(maxsize=4)
def lambda_table(N: int) -> np.ndarray:
    """Dense Lambda(n) for 0 <= n <= N."""
    lam = np.zeros(N + 1)
    if N >= 2:
        n, w = prime_powers_upto(N)
        lam[n] = w
    lam.setflags(write=False)
    return lam
