"""Exponential sums over primes, the Vaughan decomposition and the bound evaluators.

Every sum here has the shape sum_k c(k) e(l k theta).  Bilinear pieces are first
collapsed to their Dirichlet-convolution coefficients c(k) = sum_{mn=k} a(m) b(n)
(same terms, grouped by product) and then handed to the exact-phase kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .contfrac import RationalApprox, dirichlet_approx
from .errors import CapacityExceeded, InputError, PreconditionViolated
from .irrational import (FIXED_BITS, RealParam, Surd, as_real, certified_less,
                         dist_nearest_int, fixed_point_frac)
from .kernels import weighted_exp_sums
from .primes import APClass, lambda_table, mobius_upto, prime_powers_upto

VAUGHAN_CAP = 10**6
DEFAULT_EPS = 0.01
_ONE = 1 << FIXED_BITS
_HALF = _ONE >> 1

Weights = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


@dataclass(frozen=True)
class ExpSumSpec:
    N: int
    L: int
    ap: APClass = APClass()
    theta: RealParam = field(default_factory=lambda: Surd.sqrt(2))
    include_l0: bool = False

    def __post_init__(self):
        if self.N < 2:
            raise InputError("N must be >= 2")
        if self.L < 1:
            raise InputError("L must be >= 1")
        object.__setattr__(self, "theta", as_real(self.theta))

    def ls(self):
        return list(range(0 if self.include_l0 else 1, self.L + 1))


@dataclass
class ExpSumReport:
    direct: float
    pieces: Dict[str, float]
    residual: float
    bound_rhs: float
    ratio: float
    params: Dict[str, object]


# -- direct sums ---------------------------------------------------------------

def _lambda_terms(N: int, ap: APClass):
    if N < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    n, w = prime_powers_upto(N)
    keep = ap.mask(n)
    return n[keep], w[keep]


def inner_sum(N: int, ap: APClass, theta: RealParam, l: int) -> complex:
    """sum_{n <= N, n = f (d)} Lambda(n) e(l n theta)."""
    n, w = _lambda_terms(N, ap)
    if not len(n):
        return 0j
    return complex(weighted_exp_sums(n, w, theta, [l])[0])


def inner_sums(N: int, ap: APClass, theta: RealParam, ls, threads=None) -> np.ndarray:
    n, w = _lambda_terms(N, ap)
    if not len(n):
        return np.zeros(len(list(ls)), dtype=complex)
    return weighted_exp_sums(n, w, theta, ls, threads=threads)


def s_theta(spec: ExpSumSpec, threads=None) -> float:
    """sum over 1 <= |l| <= L (or |l| <= L) of |inner_sum(l)|, folded by conjugate symmetry."""
    vals = inner_sums(spec.N, spec.ap, spec.theta, range(1, spec.L + 1), threads)
    total = 2.0 * math.fsum(np.abs(vals))
    if spec.include_l0:
        total += abs(inner_sum(spec.N, spec.ap, spec.theta, 0))
    return total


def s_theta_unfolded(spec: ExpSumSpec, threads=None) -> float:
    """Same quantity summed over every l in [-L, L] explicitly (symmetry cross-check)."""
    ls = [l for l in range(-spec.L, spec.L + 1) if l or spec.include_l0]
    return math.fsum(np.abs(inner_sums(spec.N, spec.ap, spec.theta, ls, threads)))


# -- Dirichlet-convolution builder ----------------------------------------------

def _as_weight_fn(weights: Weights):
    if callable(weights):
        return lambda idx: np.asarray(weights(idx), dtype=np.float64)
    arr = np.asarray(weights, dtype=np.float64)
    return lambda idx: arr[idx]


def convolve_box(a: Weights, m_lo: int, m_hi: int, b: Weights, n_lo: int, n_hi: int,
                 N: int, out: Optional[np.ndarray] = None) -> np.ndarray:
    """c[k] += a(m) b(n) over m_lo <= m <= m_hi, n_lo <= n <= n_hi, mn <= N (dense, length N+1)."""
    af, bf = _as_weight_fn(a), _as_weight_fn(b)
    c = np.zeros(N + 1) if out is None else out
    m_lo, n_lo = max(m_lo, 1), max(n_lo, 1)
    m_hi = min(m_hi, N // n_lo)
    if m_hi < m_lo or n_hi < n_lo:
        return c
    root = math.isqrt(N)
    # m small: one vector over n per m
    for m in range(m_lo, min(m_hi, root) + 1):
        top = min(n_hi, N // m)
        if top < n_lo:
            continue
        am = float(af(np.array([m]))[0])
        if am == 0.0:
            continue
        ns = np.arange(n_lo, top + 1)
        c[m * ns] += am * bf(ns)
    # m large means n <= N/m < sqrt(N): one vector over m per n
    lo = max(m_lo, root + 1)
    if lo <= m_hi:
        for n in range(n_lo, min(n_hi, N // lo) + 1):
            bn = float(bf(np.array([n]))[0])
            if bn == 0.0:
                continue
            ms = np.arange(lo, min(m_hi, N // n) + 1)
            c[ms * n] += af(ms) * bn
    return c


def _sparse(c: np.ndarray, ap: APClass):
    k = np.flatnonzero(c)
    k = k[ap.mask(k)]
    return k, c[k]


def _eval_coeffs(c, ap, theta, ls, threads=None):
    k, w = _sparse(c, ap)
    if not len(k):
        return np.zeros(len(ls), dtype=complex)
    return weighted_exp_sums(k, w, theta, ls, threads=threads)


# -- Vaughan decomposition --------------------------------------------------------

def phi1(m: int, U: int) -> float:
    """sum over bc = m, b <= U, c <= U of mu(b) Lambda(c)."""
    if m < 1:
        raise InputError("m must be >= 1")
    mu = mobius_upto(max(U, 1))
    lam = lambda_table(max(m, 2))
    return math.fsum(float(mu[b]) * lam[m // b] for b in range(1, min(U, m) + 1)
                     if m % b == 0 and m // b <= U)


def phi2(m: int, U: int) -> float:
    """sum over b | m, b <= U of mu(b)."""
    if m < 1:
        raise InputError("m must be >= 1")
    mu = mobius_upto(max(U, 1))
    return float(sum(int(mu[b]) for b in range(1, min(U, m) + 1) if m % b == 0))


def phi1_table(M: int, U: int) -> np.ndarray:
    mu = mobius_upto(max(U, 1)).astype(np.float64)
    lam = lambda_table(max(U, 2))
    t = np.zeros(M + 1)
    for b in range(1, min(U, M) + 1):
        if mu[b]:
            cs = np.arange(1, min(U, M // b) + 1)
            t[b * cs] += mu[b] * lam[cs]
    return t


def phi2_table(M: int, U: int) -> np.ndarray:
    mu = mobius_upto(max(U, 1))
    t = np.zeros(M + 1)
    for b in range(1, min(U, M) + 1):
        if mu[b]:
            t[b::b] += mu[b]
    return t


def divisor_counts(M: int) -> np.ndarray:
    t = np.zeros(M + 1, dtype=np.int64)
    for b in range(1, M + 1):
        t[b::b] += 1
    return t


def phi_bound_violations(M: int, U: int) -> Tuple[int, int]:
    """Counts of m <= M breaking |phi1(m)| <= log m (m >= 2) or |phi2(m)| <= d(m)."""
    p1, p2 = phi1_table(M, U), phi2_table(M, U)
    m = np.arange(2, M + 1)
    bad1 = int(np.sum(np.abs(p1[2:]) > np.log(m) + 1e-12)) + int(p1[1] != 0)
    bad2 = int(np.sum(np.abs(p2[1:]) > divisor_counts(M)[1:]))
    return bad1, bad2


@dataclass(frozen=True)
class VaughanCoeffs:
    N: int
    U: int
    S1: np.ndarray
    S2: np.ndarray
    S31: np.ndarray
    S32: np.ndarray
    head: np.ndarray

    @property
    def S3(self):
        return self.S31 + self.S32


def _check_vaughan(N: int, U: int):
    if N > VAUGHAN_CAP:
        raise CapacityExceeded(f"exact decomposition is capped at N <= {VAUGHAN_CAP}")
    if N < 1 or not 1 <= U <= math.isqrt(N):
        raise InputError("need 1 <= U <= sqrt(N)")


def vaughan_coeffs(N: int, U: int) -> VaughanCoeffs:
    """Product-indexed coefficients of S1, S2, S31, S32 and the n <= U head (unrestricted)."""
    _check_vaughan(N, U)
    mu = mobius_upto(N).astype(np.float64)
    lam = lambda_table(N)
    logs = np.log(np.maximum(np.arange(N + 1), 1))
    root = math.isqrt(N)
    S1 = convolve_box(mu, 1, U, logs, 1, N, N)
    S2 = convolve_box(phi1_table(min(U * U, N), U), 1, U * U, np.ones(N + 1), 1, N, N)
    p2 = phi2_table(N // U, U)
    S31 = convolve_box(p2, U + 1, root, lam, U + 1, N, N)
    S32 = convolve_box(p2, root + 1, N // U, lam, U + 1, root, N)
    head = np.zeros(N + 1)
    head[: U + 1] = lam[: U + 1]
    return VaughanCoeffs(N, U, S1, S2, S31, S32, head)


@dataclass(frozen=True)
class VaughanPieces:
    S1: complex
    S2: complex
    S3_list: Tuple[complex, complex]
    residual: complex
    head: complex
    total: complex

    @property
    def S3(self):
        return self.S3_list[0] + self.S3_list[1]


def vaughan_pieces(N: int, U: int, ap: APClass, theta: RealParam, l: int) -> VaughanPieces:
    """S1, S2, (S31, S32) and residual = inner_sum - (S1 - S2 - S3) for one l."""
    return vaughan_pieces_multi(N, U, ap, theta, [l])[0]


def vaughan_pieces_multi(N, U, ap, theta, ls, coeffs: Optional[VaughanCoeffs] = None, threads=None):
    co = coeffs or vaughan_coeffs(N, U)
    ls = list(ls)
    ev = {name: _eval_coeffs(getattr(co, name), ap, theta, ls, threads)
          for name in ("S1", "S2", "S31", "S32", "head")}
    total = inner_sums(N, ap, theta, ls, threads)
    out = []
    for i in range(len(ls)):
        s1, s2, s31, s32 = (complex(ev[k][i]) for k in ("S1", "S2", "S31", "S32"))
        tot = complex(total[i])
        out.append(VaughanPieces(s1, s2, (s31, s32), tot - (s1 - s2 - s31 - s32),
                                 complex(ev["head"][i]), tot))
    return out


def _dyadic_edges(lo: int, hi: int, start: int):
    """Blocks (start 2^t, start 2^{t+1}] clipped to [lo, hi]; the first block also takes lo."""
    edges, a = [], start
    while a < hi:
        edges.append((max(lo, a + 1) if edges else lo, min(hi, 2 * a)))
        a *= 2
    if not edges and lo <= hi:
        edges.append((lo, hi))
    return [(x, y) for x, y in edges if x <= y]


def dyadic_pieces(N: int, U: int, ap: APClass, theta: RealParam, l: int):
    """[(piece, (lo, hi), value)] with S1/S2 split over m, S31 over m and S32 over n dyadically.

    Block t covers (2^t, 2^{t+1}] (times U for S31); the first block also takes the lower
    end point so that every term is counted exactly once.
    """
    _check_vaughan(N, U)
    mu = mobius_upto(N).astype(np.float64)
    lam = lambda_table(N)
    logs = np.log(np.maximum(np.arange(N + 1), 1))
    root = math.isqrt(N)
    p1 = phi1_table(min(U * U, N), U)
    p2 = phi2_table(N // U, U)
    ones = np.ones(N + 1)
    blocks = []
    for lo, hi in _dyadic_edges(1, U, 1):
        blocks.append(("S1", (lo, hi), convolve_box(mu, lo, hi, logs, 1, N, N)))
    for lo, hi in _dyadic_edges(1, min(U * U, N), 1):
        blocks.append(("S2", (lo, hi), convolve_box(p1, lo, hi, ones, 1, N, N)))
    for lo, hi in _dyadic_edges(U + 1, root, U):
        blocks.append(("S31", (lo, hi), convolve_box(p2, lo, hi, lam, U + 1, N, N)))
    for lo, hi in _dyadic_edges(U + 1, root, U):
        # S32 is split over its short variable n
        blocks.append(("S32", (lo, hi), convolve_box(lam, lo, hi, p2, root + 1, N // U, N)))
    return [(name, rng, complex(_eval_coeffs(c, ap, theta, [l])[0])) for name, rng, c in blocks]


# -- Lemma 3: geometric sums over a progression --------------------------------------

def _signed_frac(num: int) -> Fraction:
    """num / 2^128 reduced to [-1/2, 1/2)."""
    return Fraction((num + _HALF) % _ONE - _HALF, _ONE)


def _e(x: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(x - round(x)))


def ap_geometric_sum(x: int, x_prime: int, ap: APClass, theta: RealParam):
    """(sum_{x < m <= x', m = f (d)} e(m theta), min(x'/d + 1, ||theta d||^-1))."""
    if not 0 <= x < x_prime:
        raise InputError("need 0 <= x < x'")
    d, f = ap.d, ap.f
    j0 = (x - f) // d + 1
    j1 = (x_prime - f) // d
    J = j1 - j0 + 1
    w, _ = fixed_point_frac(theta)
    dist = dist_nearest_int(as_real(theta) * d)
    dist_f = float(dist.mid) if hasattr(dist, "mid") else float(dist)
    bound = x_prime / d + 1 if dist_f == 0 else min(x_prime / d + 1, 1.0 / dist_f)
    if J <= 0:
        return 0j, bound
    lead = _e(_signed_frac((f + j0 * d) * w))
    xd = _signed_frac(d * w)
    if xd == 0:
        return lead * J, bound
    # (1 - e(Jx)) / (1 - e(x)) = e((J-1)x/2) sin(pi J x) / sin(pi x), all phases exact
    Jx = J * xd
    r = round(Jx)
    ratio = (-1) ** (r % 2) * math.sin(math.pi * float(Jx - r)) / math.sin(math.pi * float(xd))
    half = (J - 1) * xd / 2
    return lead * _e(half) * ratio, bound


# -- Lemma 4: Vinogradov's min-sums ----------------------------------------------------

@dataclass(frozen=True)
class MinSumReport:
    X: int
    Y: int
    q: int
    lhs1: float
    lhs2: float
    rhs1: float
    rhs2: float

    @property
    def ratio1(self):
        return self.lhs1 / self.rhs1

    @property
    def ratio2(self):
        return self.lhs2 / self.rhs2


def lemma4_rhs(X, Y, q):
    return X * Y / q + (X + q) * math.log(2 * q), X * Y / q + (X + q) * math.log(2 * X * Y * q)


def _check_approx(alpha, approx: RationalApprox):
    err = abs(as_real(alpha) - Fraction(approx.a, approx.q))
    if not certified_less(err, Fraction(1, approx.q**2)):
        raise PreconditionViolated(f"|alpha - {approx.a}/{approx.q}| is not below q^-2")


def frac_distances(alpha: RealParam, xs) -> np.ndarray:
    """||alpha x|| for integer x >= 0, exact to 2^-64 and recomputed exactly when tiny."""
    w, rad = fixed_point_frac(alpha)
    xs = np.asarray(xs, dtype=np.int64)
    from .kernels import backend
    hi, lo = divmod(w, 1 << 64)
    s = backend.phase_words(xs.view(np.uint64), hi, lo).view(np.int64)
    d = np.abs(s.astype(np.float64)) / 2.0**64
    for i in np.flatnonzero(d < 2.0**-40):
        v = dist_nearest_int(as_real(alpha) * int(xs[i]))
        d[i] = float(v.mid) if hasattr(v, "mid") else float(v)
    return d


def vinogradov_minsums(X: int, Y: int, approx: RationalApprox, alpha_real: RealParam) -> MinSumReport:
    if X < 1 or Y < 1:
        raise InputError("X and Y must be >= 1")
    _check_approx(alpha_real, approx)
    xs = np.arange(1, X + 1)
    d = frac_distances(alpha_real, xs)
    inv = np.where(d > 0, 1.0 / np.where(d > 0, d, 1.0), np.inf)
    lhs1 = math.fsum(np.minimum(Y, inv))
    lhs2 = math.fsum(np.minimum(X * Y / xs, inv))
    r1, r2 = lemma4_rhs(X, Y, approx.q)
    return MinSumReport(X, Y, approx.q, lhs1, lhs2, r1, r2)


# -- Lemmas 6 and 7: bilinear sums ----------------------------------------------------

def _sup(weights: Weights, lo: int, hi: int) -> float:
    if hi < lo:
        return 0.0
    vals = _as_weight_fn(weights)(np.arange(lo, hi + 1))
    return float(np.max(np.abs(vals))) if len(vals) else 0.0


def bilinear_S(X: int, W: int, L: int, ap: APClass, theta: RealParam, phi_weights: Weights,
               psi_weights: Weights, N_cut: int, include_l0: bool = False, threads=None) -> float:
    """sum_{1<=|l|<=L} | sum_{X<v<=2X} sum_{u<=W, uv<=N_cut, uv=f (d)} phi(u) psi(v) e(l u v theta) |."""
    if min(X, W, L, N_cut) < 1:
        raise InputError("X, W, L and N_cut must be positive")
    if N_cut > 50 * VAUGHAN_CAP:
        raise CapacityExceeded("N_cut too large for a dense coefficient table")
    top = min(N_cut, 2 * X * W)
    c = convolve_box(psi_weights, X + 1, 2 * X, phi_weights, 1, W, top)
    vals = _eval_coeffs(c, ap, theta, list(range(1, L + 1)), threads)
    total = 2.0 * math.fsum(np.abs(vals))
    if include_l0:
        total += abs(complex(_eval_coeffs(c, ap, theta, [0])[0]))
    return total


def _eps_factor(base, eps):
    return base**eps if eps else 1.0


def typeII_bound(X, W, L, d, q, T, F, eps=DEFAULT_EPS) -> float:
    """T F (L W X^1/2 / d^1/2 + (LXd)^eps (LXW/q^1/2 + L X W^1/2 d^1/2 + L^1/2 q^1/2 X^1/2 W^1/2))."""
    inner = L * X * W / math.sqrt(q) + L * X * math.sqrt(W * d) + math.sqrt(L * q * X * W)
    return T * F * (L * W * math.sqrt(X / d) + _eps_factor(L * X * d, eps) * inner)


def typeI_bound(X, W, L, d, q, F, eps=DEFAULT_EPS) -> float:
    """F (LXd)^eps (LXW/q + LXd + q)."""
    return F * _eps_factor(L * X * d, eps) * (L * X * W / q + L * X * d + q)


# -- Propositions ------------------------------------------------------------------

def gamma_of(k: int) -> Fraction:
    if k < 2:
        raise InputError("degree k must be >= 2")
    return Fraction(1, 4 ** (k - 1))


def prop1_bound(N, L, q, k, eps=DEFAULT_EPS) -> float:
    """(NL)^(1+eps) (1/q + N^-1/2 + q N^-k L^-1)^gamma with gamma = 4^(1-k)."""
    g = float(gamma_of(k))
    return (N * L) ** (1 + eps) * (1 / q + N**-0.5 + q / (float(N) ** k * L)) ** g


def prop2_bound(N, L, q, d, eps=DEFAULT_EPS, trivial_guard=True) -> float:
    """(NL)^eps (NL/q^1/2 + (LNq)^1/2 + L N^3/4 d^1/2 + L N^4/5 / d^1/5), capped by LN/d."""
    main = _eps_factor(N * L, eps) * (N * L / math.sqrt(q) + math.sqrt(L * N * q)
                                      + L * N**0.75 * math.sqrt(d) + L * N**0.8 / d**0.2)
    return min(main, L * N / d) if trivial_guard else main


def prop1_sum(N: int, L: int, poly_values: np.ndarray, leading_theta: RealParam, threads=None) -> float:
    """sum_{1<=l<=L} | sum_{n<=N} Lambda(n) e(l g(n) theta) | with g(n) supplied per prime power."""
    n, w = _lambda_terms(N, APClass())
    vals = weighted_exp_sums(poly_values, w, leading_theta, range(1, L + 1), threads=threads)
    return math.fsum(np.abs(vals))


# -- parameter choices ---------------------------------------------------------------

_CHOICES = ("L_thm1", "L_thm3", "U_prop2")


def _floor_close(v: float) -> int:
    r = round(v)
    return int(r) if abs(v - r) <= 1e-9 * max(1.0, abs(v)) else math.floor(v)


def choose_params(kind: str, N: int, q: int = 1, d: int = 1, k: int = 2) -> int:
    """The parameter choices used in the proofs, floored (to the nearest integer when within 1e-9) and at least 1.

    L_thm1 = q^(-g/(1-g)) N^(kg/(1-g)), L_thm3 = N/(q d^2), U_prop2 = N^(2/5)/d^(3/5) capped at sqrt(N).
    """
    if kind not in _CHOICES:
        raise InputError(f"kind must be one of {', '.join(_CHOICES)}")
    if kind == "L_thm1":
        g = float(gamma_of(k))
        v = q ** (-g / (1 - g)) * float(N) ** (k * g / (1 - g))
    elif kind == "L_thm3":
        return max(1, N // (q * d * d))
    else:
        v = min(N**0.4 / d**0.6, math.isqrt(N))
    return max(1, _floor_close(v))


# -- ExpSumReport driver ---------------------------------------------------------------

def expsum_report(spec: ExpSumSpec, U: Optional[int] = None, q: Optional[int] = None,
                  eps: float = DEFAULT_EPS, with_pieces: bool = True, threads=None) -> ExpSumReport:
    """Direct S(theta), the Vaughan pieces summed over l, and the Prop. 2 ratio."""
    if q is None:
        q = dirichlet_approx(spec.theta, max(1, math.isqrt(spec.N))).q
    U = U or choose_params("U_prop2", spec.N, d=spec.ap.d)
    direct = s_theta(spec, threads)
    pieces, residual, identity_error = {}, 0.0, 0.0
    if with_pieces and spec.N <= VAUGHAN_CAP:
        ls = list(range(1, spec.L + 1))
        res = vaughan_pieces_multi(spec.N, U, spec.ap, spec.theta, ls, threads=threads)
        for key, get in (("S1'", lambda p: p.S1), ("S2'", lambda p: p.S2),
                         ("S31'", lambda p: p.S3_list[0]), ("S32'", lambda p: p.S3_list[1])):
            pieces[key] = 2.0 * math.fsum(abs(get(p)) for p in res)
        residual = max(abs(p.residual) for p in res)
        identity_error = max(abs(p.residual - p.head) for p in res)
    bound = prop2_bound(spec.N, spec.L, q, spec.ap.d, eps)
    params = {"N": spec.N, "L": spec.L, "d": spec.ap.d, "f": spec.ap.f, "q": q, "U": U,
              "eps": eps, "include_l0": spec.include_l0, "identity_error": identity_error}
    return ExpSumReport(direct, pieces, residual, bound, direct / bound if bound > 0 else math.nan, params)
