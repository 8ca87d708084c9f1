"""Continued fractions, Dirichlet approximation and irrationality-type estimates."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from .errors import (InputError, InsufficientConvergents, PrecisionExhausted,
                     PreconditionViolated, UndecidableAtPrecision)
from .irrational import Interval, RealParam, Surd, as_real, decide, dist_nearest_int, to_interval


def convergents_of(quotients: Sequence[int]) -> List[Tuple[int, int]]:
    """(p_n, q_n) from the standard recurrence with seeds p_{-1}=1, p_{-2}=0."""
    out = []
    p1, p2, q1, q2 = 1, 0, 0, 1
    for a in quotients:
        p1, p2 = a * p1 + p2, p1
        q1, q2 = a * q1 + q2, q1
        out.append((p1, q1))
    return out


@dataclass(frozen=True)
class ContinuedFraction:
    partial_quotients: Tuple[int, ...]
    convergents: Tuple[Tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        qs = tuple(int(a) for a in self.partial_quotients)
        object.__setattr__(self, "partial_quotients", qs)
        if not self.convergents:
            object.__setattr__(self, "convergents", tuple(convergents_of(qs)))

    @property
    def numerators(self):
        return [p for p, _ in self.convergents]

    @property
    def denominators(self):
        return [q for _, q in self.convergents]

    def to_dict(self):
        return {"quotients": list(self.partial_quotients),
                "convergents": [[p, q] for p, q in self.convergents]}

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["quotients"]), tuple((p, q) for p, q in data["convergents"]))


@dataclass(frozen=True)
class RationalApprox:
    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InputError("approximation denominator must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise InputError(f"{self.a}/{self.q} is not in lowest terms")


@dataclass(frozen=True)
class TypeEstimate:
    t_lower: float
    samples: Tuple[Tuple[int, float], ...]
    local_exponents: Tuple[Tuple[int, float], ...]


def _surd_quotients(x: Surd) -> Iterator[int]:
    if x.q == 0:
        yield from _rational_quotients(Fraction(x.p, x.r))
        return
    # write x = (P + sqrt(M)) / Q with Q | (M - P^2)
    M = x.q * x.q * x.D
    P, Q = (x.p, x.r) if x.q > 0 else (-x.p, -x.r)
    if (M - P * P) % Q:
        P, M, Q = P * abs(Q), M * Q * Q, Q * abs(Q)
    s = math.isqrt(M)
    while True:
        a = (P + s) // Q if Q > 0 else -((P + s) // -Q) - 1
        yield a
        P = a * Q - P
        Q = (M - P * P) // Q


def _rational_quotients(v: Fraction) -> Iterator[int]:
    num, den = v.numerator, v.denominator
    while den:
        a = num // den
        yield a
        num, den = den, num - a * den


def _interval_quotients(x: Interval) -> Iterator[int]:
    while True:
        try:
            a = x.floor()
        except UndecidableAtPrecision:
            raise PrecisionExhausted("interval too wide to certify the next partial quotient") from None
        yield a
        frac = x - a
        if frac.lo == frac.hi == 0:
            return
        if frac.lo <= 0:
            raise PrecisionExhausted("interval too wide to certify the next partial quotient")
        x = frac.inverse()


def iter_quotients(x: RealParam) -> Iterator[int]:
    """Lazily yield partial quotients; exact (and unbounded) for irrational surds."""
    x = as_real(x)
    if isinstance(x, Surd):
        return _surd_quotients(x)
    return _interval_quotients(x)


def cf_expand(x: RealParam, count: int) -> ContinuedFraction:
    """First ``count`` partial quotients of x and their convergents.

    A rational x yields its full (finite) expansion, which may be shorter.
    """
    if count < 1:
        raise InputError("count must be positive")
    qs = []
    for a in iter_quotients(x):
        qs.append(a)
        if len(qs) == count:
            break
    return ContinuedFraction(tuple(qs))


def surd_from_cf(prefix: Sequence[int], period: Sequence[int]) -> Surd:
    """Exact value of the eventually periodic expansion [prefix; period, period, ...]."""
    if not period:
        raise InputError("period must be non-empty")
    (Pk, Qk), (Pk1, Qk1) = convergents_of(period)[-1], ([(1, 0)] + convergents_of(period))[-2]
    # purely periodic tail y solves Qk y^2 + (Qk1 - Pk) y - Pk1 = 0, positive root
    b = Qk1 - Pk
    y = Surd(-b, 1, b * b + 4 * Qk * Pk1, 2 * Qk)
    if not prefix:
        return y
    convs = convergents_of(prefix)
    pn, qn = convs[-1]
    pn1, qn1 = convs[-2] if len(convs) > 1 else (1, 0)
    return (y * pn + pn1) / (y * qn + qn1)


def dirichlet_approx(x: RealParam, Q: int) -> RationalApprox:
    """Last convergent a/q of x with q <= Q; then |x - a/q| < 1/(q (Q+1))."""
    if Q < 1:
        raise InputError("Q must be >= 1")
    best = None
    p1, p2, q1, q2 = 1, 0, 0, 1
    for a in iter_quotients(x):
        p1, p2 = a * p1 + p2, p1
        q1, q2 = a * q1 + q2, q1
        if q1 > Q:
            break
        best = (p1, q1)
    return RationalApprox(*best)


def _log_dist(value: RealParam) -> float:
    """log ||value||, accurate even when ||value|| underflows a float."""
    d = dist_nearest_int(value)
    if isinstance(d, Interval):
        if d.lo <= 0:
            raise PrecisionExhausted("interval too wide to bound ||q x|| away from zero")
        m = d.mid
    else:
        if d.sign() == 0:
            raise InputError("x is rational; its type is undefined")
        bits = 64 + 2 * max(abs(d.p).bit_length(), abs(d.q).bit_length(), d.r.bit_length())
        m = to_interval(d, bits).mid
    return math.log(m.numerator) - math.log(m.denominator)


def type_estimate(x: RealParam, n_max: int, skip: int = 3) -> TypeEstimate:
    """Empirical lower estimate of the irrationality type from the first convergents.

    ``samples`` holds (q_n, -log||q_n x|| / log q_n).  Those raw exponents carry an
    O(1/log q_n) bias, so ``t_lower`` is built from local exponents: the slope of
    log(1/||q x||) against log q between q_n and the latest earlier convergent q_j
    with log q_j <= log q_n - max(1, log(q_n)/2).  The constant cancels in the
    slope, a single huge partial quotient still shows up as a spike, and t_lower
    is the largest local exponent for n >= ``skip``, clamped to at least 1.
    """
    if n_max < 3:
        raise InputError("n_max must be >= 3")
    x = as_real(x)
    cf = cf_expand(x, n_max + 1)
    pts = []
    for n, (_, q) in enumerate(cf.convergents[:n_max]):
        pts.append((n, q, math.log(q), -_log_dist(x * q)))
    samples = tuple((q, l / lq) for _, q, lq, l in pts if q >= 2)
    local, best = [], 1.0
    for i, (n, q, lq, l) in enumerate(pts):
        gap = max(1.0, lq / 2)
        ref = [p for p in pts[:i] if lq - p[2] >= gap]
        if not ref:
            continue
        _, _, lq0, l0 = ref[-1]
        rho = (l - l0) / (lq - lq0)
        local.append((q, rho))
        if n >= skip:
            best = max(best, rho)
    return TypeEstimate(best, samples, tuple(local))


def _threshold_compare(p: int, factors) -> bool:
    """True iff p <= prod(x_i ** e_i) for positive reals x_i and rational e_i."""
    exps = [Fraction(e) for _, e in factors]
    M = 1
    for e in exps:
        M = M * e.denominator // math.gcd(M, e.denominator)
    xs = [as_real(x) for x, _ in factors]

    def compute(*vals):
        prod = 1
        for v, e in zip(vals, exps):
            k = int(e * M)
            prod = prod * (v ** k)
        return (prod - p ** M).sign() >= 0

    return decide(compute, xs)


def select_index(cf: ContinuedFraction, factors) -> int:
    """Unique m with p_m <= prod(x_i ** e_i) < p_{m+1} over the numerators of ``cf``."""
    nums = cf.numerators
    if len(nums) < 2:
        raise InsufficientConvergents("need at least two convergents to bracket the threshold")
    if not _threshold_compare(nums[0], factors):
        raise PreconditionViolated("threshold lies below p_0")
    m = 0
    for n in range(1, len(nums)):
        if _threshold_compare(nums[n], factors):
            m = n
        else:
            return m
    raise InsufficientConvergents(f"all {len(nums)} numerators lie below the threshold")


def select_m(alpha: RealParam, B: RealParam, gamma, cf: ContinuedFraction) -> int:
    """m with p_m <= alpha^((1+gamma)/gamma) * B < p_{m+1} (p_0 = a_0 indexing)."""
    gamma = Fraction(gamma)
    return select_index(cf, [(alpha, (1 + gamma) / gamma), (B, 1)])


def expand_past(x: RealParam, factors, extra: int = 0, start: int = 8) -> ContinuedFraction:
    """Expansion of x long enough that select_index succeeds with ``extra`` spare terms."""
    count = start
    while True:
        cf = cf_expand(x, count)
        try:
            m = select_index(cf, factors)
        except InsufficientConvergents:
            if len(cf.partial_quotients) < count:
                raise
            count *= 2
            continue
        if m + extra < len(cf.partial_quotients):
            return cf
        if len(cf.partial_quotients) < count:
            raise InsufficientConvergents("expansion terminates before p_{m+l}")
        count = max(count * 2, m + extra + 2)
