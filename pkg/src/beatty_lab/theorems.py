"""Desk-scale experiments for primes in Beatty sequences and the least-prime bounds.

Reports carry the measured left side, the main term, their difference and the value
of the predicted error expression, so the (inexplicit) implied constants can be
read off rather than assumed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .beatty import BeattyParams, member_mask
from .contfrac import dirichlet_approx, expand_past, select_index, type_estimate
from .errors import (CapacityExceeded, InputError, InsufficientConvergents, NotFoundBelowCap,
                     PrecisionExhausted, PreconditionViolated)
from .expsums import gamma_of
from .irrational import RealParam, Surd, as_real, certified_less, decide
from .primes import APClass, chebyshev_psi, chebyshev_theta, primes_upto, prime_powers_upto, sieve

WIDE_LIMIT = 1 << 127
_INT64_SAFE = 1 << 62
TYPE_TERMS = 20


@dataclass(frozen=True)
class IntPolynomial:
    """g(x) = a_0 + a_1 x + ... + a_k x^k with integer coefficients, k >= 2, a_k >= 1."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if len(cs) < 3:
            raise InputError("polynomial degree must be >= 2")
        if cs[-1] < 1:
            raise InputError("leading coefficient must be >= 1")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Comma-separated coefficients a_0,...,a_k (e.g. "0,0,1" for x^2)."""
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError:
            raise InputError(f"cannot parse polynomial coefficients {text!r}") from None

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def gamma(self) -> Fraction:
        return gamma_of(self.k)

    def __call__(self, x: int) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        if abs(v) > WIDE_LIMIT:
            raise CapacityExceeded(f"g({x}) exceeds 2^127")
        return v

    def magnitude_bound(self, x_max: int) -> int:
        return sum(abs(c) * x_max**i for i, c in enumerate(self.coeffs))

    def values(self, xs: np.ndarray):
        """g over an integer array: int64 when safely representable, else a list of ints."""
        xs = np.asarray(xs, dtype=np.int64)
        if not len(xs):
            return np.zeros(0, dtype=np.int64)
        if self.magnitude_bound(int(xs.max())) < _INT64_SAFE:
            v = np.zeros(len(xs), dtype=np.int64)
            for c in reversed(self.coeffs):
                v = v * xs + c
            return v
        return [self(int(x)) for x in xs]

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs)


@dataclass
class TheoremReport:
    lhs: float
    main: float
    error: float
    predicted_bound: float
    params: Dict[str, object]
    runtime: float = 0.0
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def relative_deviation(self) -> float:
        return abs(self.error) / self.main if self.main else math.inf


def _member_values(values, params: BeattyParams) -> np.ndarray:
    """Membership for arbitrary integers (values <= 0 can only hit floor(alpha + beta) = 0)."""
    if isinstance(values, np.ndarray):
        vals = values
        out = np.zeros(len(vals), dtype=bool)
        pos = vals >= 1
        if pos.any():
            out[pos] = member_mask(vals[pos], params)
    else:
        from .beatty import is_member
        out = np.array([v >= 1 and is_member(v, params) for v in values], dtype=bool)
        vals = np.array([min(max(v, -1), 1) for v in values])
    if (vals <= 0).any():
        first = decide(lambda a, b: (a + b).floor(), (params.alpha, params.beta))
        out[vals == 0] = first == 0
    return out


def _type_lower(x: RealParam) -> float:
    try:
        return type_estimate(x, TYPE_TERMS).t_lower
    except (PrecisionExhausted, InputError):
        return 1.0


def thm1_error_bound(N, q, k, eps):
    g = float(gamma_of(k))
    return N**eps * (N * q**-g + N ** (1 - g / 2) + q ** (g / (1 - g)) * N ** ((1 - (k + 1) * g) / (1 - g))
                     + q**g * N ** (1 - k * g))


def thm1_experiment(g: IntPolynomial, params: BeattyParams, N: int, eps: float = 0.01,
                    include_prime_powers: bool = False) -> TheoremReport:
    """Sum of log p over p <= N with g(p) in B(alpha, beta) against theta(N)/alpha."""
    if N < 3:
        raise InputError("N must be >= 3")
    t0 = time.perf_counter()
    alpha = params.alpha
    ps = primes_upto(N)
    logs = np.log(ps.astype(np.float64))
    hit = _member_values(g.values(ps), params)
    lhs = math.fsum(logs[hit])
    n, w = prime_powers_upto(N)
    powers = ~np.isin(n, ps)
    pp_hit = _member_values(g.values(n[powers]), params)
    pp_sum = math.fsum(w[powers][pp_hit])
    theta = math.fsum(logs)
    psi = chebyshev_psi(N)
    if include_prime_powers:
        lhs += pp_sum
    main = (psi if include_prime_powers else theta) / float(alpha)
    x = as_real(Fraction(g.leading)) / alpha
    t = _type_lower(x)
    Q = max(1, int(N ** (g.k * t / (t + 1))))
    q = dirichlet_approx(x, Q).q
    bound = thm1_error_bound(N, q, g.k, eps)
    return TheoremReport(lhs, main, lhs - main, bound,
                         {"g": str(g), "alpha": str(alpha), "beta": str(params.beta), "N": N, "eps": eps,
                          "include_prime_powers": include_prime_powers},
                         time.perf_counter() - t0,
                         {"q": q, "Q": Q, "t_lower": t, "prime_count": int(hit.sum()),
                          "prime_power_sum": pp_sum, "psi_minus_theta": psi - theta,
                          "relative_deviation": abs(lhs - main) / main})


# -- Theorem 2 and Remark 1 -------------------------------------------------------

@dataclass(frozen=True)
class LeastPrimeBound:
    bound: float
    m: int
    l: int
    p_m: int
    p_ml: int
    exponents: Tuple[float, ...]
    N_choice: Optional[float] = None
    q_choice: Optional[int] = None
    eta: Optional[float] = None


def _log(x) -> float:
    return math.log(float(x))


def thm2_eps_cap(k: int) -> Fraction:
    g = gamma_of(k)
    return g * g / (2 * (2 * k + g))


def thm2_exponents(k: int, eps: float):
    g = float(gamma_of(k))
    return ((2 * k - 1) / (k * g) - (g + 1) * eps / g, (k - 1) / k - eps / g, 1 / k + eps / g)


def thm2_bound(g: IntPolynomial, params: BeattyParams, l: int, eps: float = 0.0) -> LeastPrimeBound:
    """alpha^(..) B^(..) p_{m+l}^(..) with m from p_m <= alpha^((1+gamma)/gamma) B < p_{m+1}.

    Convergent numerators come from the expansion of alpha / a_k.
    """
    k, gam = g.k, g.gamma
    if l < 1:
        raise InputError("l must be a positive integer")
    if not 0 <= eps < thm2_eps_cap(k):
        raise InputError(f"eps must satisfy 0 <= eps < gamma^2/(2(2k+gamma)) = {float(thm2_eps_cap(k)):.3g}")
    alpha, B = params.alpha, params.B
    x = alpha / g.leading
    factors = [(alpha, (1 + gam) / gam), (B, 1)]
    cf = expand_past(x, factors, extra=l)
    m = select_index(cf, factors)
    p_m, p_ml = cf.numerators[m], cf.numerators[m + l]
    e = thm2_exponents(k, eps)
    gf = float(gam)
    la, lb = _log(alpha), _log(B)
    bound = math.exp(e[0] * la + e[1] * lb + e[2] * math.log(p_ml))
    log_eta = math.log(p_ml) - (1 + gf) / gf * la - lb
    log_N = (2 * k - 1) / (k * gf) * la + (k - 1) / k * lb + math.log(p_ml) / k + eps / gf * log_eta
    return LeastPrimeBound(bound, m, l, p_m, p_ml, e, math.exp(log_N), p_ml, math.exp(log_eta))


def thm2_chain_rhs(alpha: float, beta: float, N: float, q: float, k: int, eps: float, C: float) -> float:
    """Right side of 0.73 > 1.04 (alpha/N)(alpha+beta-1) + 1.81 alpha/N^1/2 + C N^eps alpha (...)."""
    g = float(gamma_of(k))
    xi = q**-g + N ** (-g / 2) + q**g * N ** (-k * g) + q ** (g / (1 - g)) * N ** (-k * g / (1 - g))
    return (1.04 * alpha / N * (alpha + beta - 1) + 1.81 * alpha / math.sqrt(N)
            + C * N**eps * alpha * xi)


def thm2_min_l(g: IntPolynomial, params: BeattyParams, eps: float, C: float, l_max: int = 40):
    """Smallest l <= l_max for which the chain inequality holds at q = p_{m+l}, else None."""
    a, b = float(params.alpha), float(params.beta)
    for l in range(1, l_max + 1):
        try:
            res = thm2_bound(g, params, l, eps)
        except InsufficientConvergents:
            return None
        if thm2_chain_rhs(a, b, res.N_choice, res.q_choice, g.k, eps, C) < 0.73:
            return l
    return None


REMARK1_D_MAX = 500


def remark1_bound(params: BeattyParams, ap: APClass, l: int, eps: float = 0.0) -> LeastPrimeBound:
    """alpha^(3-7e) B^((1-3e)/2) d^(3-10e) p_{m+l}^(1+3e), convergents of alpha itself."""
    if ap.d > REMARK1_D_MAX:
        raise PreconditionViolated(f"d must be <= {REMARK1_D_MAX}")
    if l < 1:
        raise InputError("l must be a positive integer")
    if eps < 0:
        raise InputError("eps must be non-negative")
    if not certified_less(1, params.alpha):
        raise PreconditionViolated("alpha must exceed 1")
    alpha, B, d = params.alpha, params.B, ap.d
    factors = [(alpha, Fraction(7, 3)), (B, Fraction(1, 2)), (Surd.rational(d), Fraction(10, 3))]
    cf = expand_past(alpha, factors, extra=l)
    m = select_index(cf, factors)
    p_m, p_ml = cf.numerators[m], cf.numerators[m + l]
    e = (3 - 7 * eps, (1 - 3 * eps) / 2, 3 - 10 * eps, 1 + 3 * eps)
    bound = math.exp(e[0] * _log(alpha) + e[1] * _log(B) + e[2] * math.log(d) + e[3] * math.log(p_ml))
    return LeastPrimeBound(bound, m, l, p_m, p_ml, e)


def least_prime_search(g: Optional[IntPolynomial], params: BeattyParams, cap: int,
                       ap: APClass = APClass(), chunk: int = 1 << 16) -> int:
    """Smallest prime p <= cap (in the class ap) with g(p) in B; g=None means g(p) = p."""
    if cap < 2:
        raise NotFoundBelowCap(cap)
    lo = 2
    while lo <= cap:
        hi = min(cap, lo + chunk - 1)
        ps = sieve(lo, hi).primes()
        ps = ps[ap.mask(ps)]
        if len(ps):
            vals = ps if g is None else g.values(ps)
            hit = np.flatnonzero(_member_values(vals, params))
            if len(hit):
                return int(ps[hit[0]])
        lo = hi + 1
        chunk *= 2
    raise NotFoundBelowCap(cap)


# -- Theorem 3 ------------------------------------------------------------------

@dataclass(frozen=True)
class BeattyPrimeSum:
    value: float
    primes: np.ndarray
    logs: np.ndarray


def beatty_prime_sum(N: int, params: BeattyParams, ap: APClass = APClass()) -> BeattyPrimeSum:
    """sum of log p over p <= N, p in B(alpha, beta), p = f (d); no size conditions on d."""
    ps = primes_upto(N)
    ps = ps[ap.mask(ps)]
    ps = ps[_member_values(ps, params)] if len(ps) else ps
    logs = np.log(ps.astype(np.float64))
    return BeattyPrimeSum(math.fsum(logs), ps, logs)


def thm3_error_bound(N, q, d, eps):
    return N**eps * (N / math.sqrt(q) + math.sqrt(N * q) + N**0.75 * math.sqrt(d) + N**0.8 / d**0.2)


def thm3_experiment(params: BeattyParams, ap: APClass, N: int, eps: float = 0.01) -> TheoremReport:
    """Beatty primes in a progression against theta(N; d, f)/alpha."""
    if N < 3:
        raise InputError("N must be >= 3")
    t0 = time.perf_counter()
    inv = params.alpha.inverse() if isinstance(params.alpha, Surd) else 1 / params.alpha
    t = _type_lower(inv)
    Q = max(1, int(N ** (t / (1 + t))))
    q = dirichlet_approx(inv, Q).q
    d = ap.d
    if d > 1 and (d * d > q or d**6 > N):
        raise PreconditionViolated(f"need d <= min(q^1/2, N^1/6); got d={d}, q={q}, N={N}")
    core = beatty_prime_sum(N, params, ap)
    main = chebyshev_theta(N, ap) / float(params.alpha)
    lhs = core.value
    return TheoremReport(lhs, main, lhs - main, thm3_error_bound(N, q, d, eps),
                         {"alpha": str(params.alpha), "beta": str(params.beta), "d": d, "f": ap.f,
                          "N": N, "eps": eps},
                         time.perf_counter() - t0,
                         {"q": q, "Q": Q, "t_lower": t, "prime_count": int(len(core.primes)),
                          "relative_deviation": abs(lhs - main) / main if main else math.inf})


def residue_identity(N: int, params: BeattyParams, d: int):
    """(per-class sums, unrestricted sum, sum over members p | d) for the residue-sum identity."""
    per_class = {f: beatty_prime_sum(N, params, APClass(d, f)) for f in range(1, d) if math.gcd(f, d) == 1}
    full = beatty_prime_sum(N, params)
    dividing = full.primes[d % full.primes == 0] if len(full.primes) else full.primes
    return per_class, full, dividing
