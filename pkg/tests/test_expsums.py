import cmath
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from beatty_lab import expsums as es
from beatty_lab.contfrac import RationalApprox
from beatty_lab.errors import CapacityExceeded, PrecisionExhausted
from beatty_lab.irrational import Interval, Surd
from beatty_lab.primes import APClass, chebyshev_psi, lambda_table, mobius_upto

from conftest import PHI, SQRT2, SQRT3
from oracles import exp_sum, mangoldt, mobius, mp_surd, s_theta as oracle_s_theta

HALF = Surd.rational(Fraction(1, 2))


def test_inner_sum_examples():
    assert es.inner_sum(1, APClass(), SQRT2, 1) == 0
    assert es.inner_sum(10, APClass(), SQRT2, 0).real == pytest.approx(chebyshev_psi(10), rel=1e-15)
    got = es.inner_sum(10, APClass(4, 1), HALF, 1)
    assert got.real == pytest.approx(-(math.log(5) + math.log(3)), rel=1e-14)
    assert abs(got.imag) < 1e-14


def test_s_theta_examples():
    spec = es.ExpSumSpec(10, 1, APClass(), Surd.rational(0))
    assert es.s_theta(spec) == pytest.approx(2 * chebyshev_psi(10), rel=1e-15)
    spec = es.ExpSumSpec(50, 3, APClass(3, 2), SQRT2)
    assert es.s_theta(spec) == pytest.approx(oracle_s_theta(50, 3, 3, 2, SQRT2), rel=1e-9)


def test_s_theta_random_against_oracle():
    rng = random.Random(11)
    for _ in range(8):
        N, L, d = rng.randint(2, 400), rng.randint(1, 4), rng.randint(1, 7)
        f = rng.choice([f for f in range(1, d) if math.gcd(f, d) == 1]) if d > 1 else 0
        theta = Surd(rng.randint(0, 3), 1, rng.choice([2, 3, 5, 7, 11]), rng.randint(1, 5))
        spec = es.ExpSumSpec(N, L, APClass(d, f), theta, include_l0=rng.random() < 0.3)
        want = oracle_s_theta(N, L, d, f, theta, spec.include_l0)
        assert es.s_theta(spec) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_trivial_bound_and_symmetry():
    for d, f in [(1, 0), (3, 1), (5, 2)]:
        ap = APClass(d, f)
        for L in (1, 3):
            spec = es.ExpSumSpec(2000, L, ap, PHI)
            psi = chebyshev_psi(2000, ap)
            assert es.s_theta(spec) <= 2 * L * psi
            assert es.s_theta(spec) == pytest.approx(es.s_theta_unfolded(spec), rel=1e-12)
            with_l0 = es.ExpSumSpec(2000, L, ap, PHI, include_l0=True)
            assert es.s_theta(with_l0) <= (2 * L + 1) * psi * (1 + 1e-12)
        for l in (1, 2, 7):
            assert es.inner_sum(3000, ap, SQRT3, -l) == pytest.approx(es.inner_sum(3000, ap, SQRT3, l).conjugate(), rel=1e-13)


def test_shift_by_one_is_exact():
    for l in (1, 5, 40):
        assert es.inner_sum(5000, APClass(3, 1), SQRT2, l) == es.inner_sum(5000, APClass(3, 1), SQRT2 + 1, l)


def test_interval_theta_precision():
    mid = Fraction("1.4142135623730950488016887")
    theta = Interval(mid - Fraction(1, 10**20), mid + Fraction(1, 10**20))
    es.inner_sum(100, APClass(), theta, 1)
    with pytest.raises(PrecisionExhausted):
        es.inner_sum(10**6, APClass(), theta, 3)


def test_vaughan_u_one():
    p = es.vaughan_pieces(100, 1, APClass(), SQRT2, 1)
    assert p.S2 == 0
    assert p.head == 0
    assert abs(p.residual) < 1e-9
    assert p.S1 - p.S3_list[0] - p.S3_list[1] == pytest.approx(p.total, abs=1e-9)


def test_vaughan_residual_is_head():
    p = es.vaughan_pieces(10**4, 10, APClass(), SQRT2, 1)
    assert abs(p.residual) <= 1.04 * 10
    p = es.vaughan_pieces(10**4, 100, APClass(3, 1), SQRT2, 1)
    head = exp_sum(100, 3, 1, SQRT2, 1)
    assert abs(p.residual - head) < 1e-9
    assert abs(p.head - head) < 1e-9


def test_dyadic_blocks_reassemble():
    for N, U, ap in [(1000, 5, APClass()), (1000, 31, APClass(3, 2)), (600, 1, APClass(5, 4))]:
        whole = es.vaughan_pieces(N, U, ap, PHI, 2)
        blocks = es.dyadic_pieces(N, U, ap, PHI, 2)
        sums = {}
        for name, _, v in blocks:
            sums[name] = sums.get(name, 0) + v
        got = sums.get("S1", 0) - sums.get("S2", 0) - sums.get("S31", 0) - sums.get("S32", 0)
        assert got + whole.head == pytest.approx(whole.total, abs=1e-9 * max(1.0, abs(whole.total)))


def test_vaughan_cap():
    with pytest.raises(CapacityExceeded):
        es.vaughan_coeffs(es.VAUGHAN_CAP + 1, 10)


def test_phi_values():
    assert es.phi1(1, 5) == 0
    assert es.phi1(6, 6) == pytest.approx(-math.log(6), rel=1e-15)
    U = 7
    for m in range(1, 200):
        want1 = sum(mobius(a) * mangoldt(m // a) for a in range(1, U + 1) if m % a == 0 and m // a <= U)
        want2 = sum(mobius(a) for a in range(1, U + 1) if m % a == 0)
        assert es.phi1(m, U) == pytest.approx(want1, abs=1e-12)
        assert es.phi2(m, U) == pytest.approx(want2, abs=1e-12)
    assert es.phi_bound_violations(20000, 40) == (0, 0)


def _mp_geometric(x, xp, d, f, theta):
    t = mp_surd(theta)
    return complex(mpmath.fsum(mpmath.expj(2 * mpmath.pi * m * t) for m in range(x + 1, xp + 1) if (m - f) % d == 0 or d == 1))


def test_geometric_sum():
    v, b = es.ap_geometric_sum(0, 10, APClass(), Surd.rational(0))
    assert v == 10 and b == 11
    v, _ = es.ap_geometric_sum(0, 4, APClass(), HALF)
    assert abs(v) < 1e-15
    rng = random.Random(3)
    for _ in range(300):
        d = rng.randint(1, 12)
        f = rng.choice([f for f in range(1, d) if math.gcd(f, d) == 1]) if d > 1 else 0
        x = rng.randint(0, 500)
        xp = x + rng.randint(1, 400)
        theta = Surd(rng.randint(-3, 3), rng.randint(1, 4), rng.choice([2, 3, 6, 7, 10]), rng.randint(1, 9))
        v, bound = es.ap_geometric_sum(x, xp, APClass(d, f), theta)
        assert abs(v - _mp_geometric(x, xp, d, f, theta)) < 1e-9
        assert abs(v) <= 2 * bound


def test_minsums():
    rep = es.vinogradov_minsums(1, 1, RationalApprox(1, 1), SQRT2)
    assert rep.lhs1 == 1
    rep = es.vinogradov_minsums(5, 25, RationalApprox(7, 5), SQRT2)
    a = mp_surd(SQRT2)
    dist = [abs(x * a - mpmath.nint(x * a)) for x in range(1, 6)]
    assert 1 / float(dist[4]) == pytest.approx(14.0711, abs=1e-3)
    assert rep.lhs1 == pytest.approx(float(sum(min(25, 1 / t) for t in dist)), rel=1e-12)
    assert rep.lhs2 == pytest.approx(float(sum(min(mpmath.mpf(125) / x, 1 / t) for x, t in enumerate(dist, 1))), rel=1e-12)
    rep = es.vinogradov_minsums(25, 25, RationalApprox(7, 5), SQRT2)
    assert rep.rhs1 == pytest.approx(es.lemma4_rhs(25, 25, 5)[0])


def _naive_bilinear(X, W, L, d, f, theta, phi, psi, N_cut):
    t = mp_surd(theta)
    total = 0.0
    for l in range(-L, L + 1):
        if l == 0:
            continue
        acc = mpmath.mpc(0)
        for v in range(X + 1, 2 * X + 1):
            for u in range(1, W + 1):
                n = u * v
                if n <= N_cut and (d == 1 or n % d == f) and phi[u] and psi[v]:
                    acc += phi[u] * psi[v] * mpmath.expj(2 * mpmath.pi * l * n * t)
        total += abs(acc)
    return float(total)


def test_bilinear_against_double_loop():
    mu = mobius_upto(60).astype(float)
    lam = lambda_table(120)
    assert es.bilinear_S(1, 1, 1, APClass(), SQRT2, mu, lam, 10) == pytest.approx(2 * lam[2], rel=1e-14)
    for X, W, L, ap, cut in [(20, 30, 2, APClass(), 10**4), (40, 60, 3, APClass(3, 2), 2000), (17, 9, 1, APClass(4, 1), 100)]:
        got = es.bilinear_S(X, W, L, ap, PHI, mu, lam, cut)
        assert got == pytest.approx(_naive_bilinear(X, W, L, ap.d, ap.f, PHI, mu, lam, cut), rel=1e-9)


def test_bilinear_integer_theta_collapses():
    mu = mobius_upto(30).astype(float)
    lam = lambda_table(60)
    got = es.bilinear_S(30, 30, 3, APClass(), Surd.rational(2), mu, lam, 10**4)
    plain = sum(mu[u] * lam[v] for u in range(1, 31) for v in range(31, 61))
    assert got == pytest.approx(6 * abs(plain), rel=1e-12)


def test_bound_formulas():
    assert es.typeI_bound(1, 1, 1, 1, 1, 1, eps=0) == 3
    big = es.typeI_bound(10**4, 10**4, 1, 1, 100, 1, eps=0)
    bigger_q = es.typeI_bound(10**4, 10**4, 1, 1, 200, 1, eps=0)
    assert (big - 10**4 - 100) / (bigger_q - 10**4 - 200) == pytest.approx(2)
    assert es.gamma_of(2) == Fraction(1, 4)
    N = 10**6
    plain = es.prop2_bound(N, 1, N, 1, eps=0, trivial_guard=False)
    assert plain == pytest.approx(N / N**0.5 + N**0.5 * N**0.5 + N**0.75 + N**0.8, rel=1e-14)
    assert es.prop2_bound(N, 1, N, 1, eps=0) == min(plain, N)
    assert es.prop1_bound(N, 2, 10, 2, eps=0) == pytest.approx(2 * N * (0.1 + N**-0.5 + 10 / (N**2 * 2)) ** 0.25)


def test_bounds_monotone():
    for N1, N2 in [(10**3, 10**4), (10**4, 10**6)]:
        for L1, L2 in [(1, 2), (2, 8)]:
            assert es.prop2_bound(N1, L1, 97, 3) <= es.prop2_bound(N2, L1, 97, 3)
            assert es.prop2_bound(N1, L1, 97, 3) <= es.prop2_bound(N1, L2, 97, 3)
            assert es.prop1_bound(N1, L1, 97, 2) <= es.prop1_bound(N2, L1, 97, 2)
            assert es.prop1_bound(N1, L1, 97, 3) <= es.prop1_bound(N1, L2, 97, 3)
            assert es.typeII_bound(N1, 50, L1, 3, 97, 1, 1) <= es.typeII_bound(N2, 50, L2, 3, 97, 1, 1)
            assert es.typeI_bound(N1, 50, L1, 3, 97, 1) <= es.typeI_bound(N2, 50, L2, 3, 97, 1)


def test_choose_params():
    assert es.choose_params("L_thm3", 10**6, q=10**3, d=10) == 10
    assert es.choose_params("U_prop2", 10**5) == 100
    assert es.choose_params("L_thm1", 10**4, q=100, k=2) == 100


def test_report_ratio():
    rep = es.expsum_report(es.ExpSumSpec(3000, 2, APClass(3, 1), SQRT2))
    assert rep.ratio == pytest.approx(rep.direct / rep.bound_rhs, rel=1e-15)
    assert set(rep.pieces) == {"S1'", "S2'", "S31'", "S32'"}
    assert rep.params["identity_error"] < 1e-9


def test_prop1_sum_matches_loop():
    from beatty_lab.primes import prime_powers_upto
    n, w = prime_powers_upto(300)
    vals = n * n + 3 * n + 1
    got = es.prop1_sum(300, 2, vals, SQRT2)
    t = mp_surd(SQRT2)
    want = 0.0
    for l in (1, 2):
        want += abs(complex(mpmath.fsum(wi * mpmath.expj(2 * mpmath.pi * l * int(v) * t) for v, wi in zip(vals, w))))
    assert got == pytest.approx(want, rel=1e-10)
    assert cmath.isfinite(got)
