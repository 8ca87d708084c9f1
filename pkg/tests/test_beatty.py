import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beatty_lab.beatty import (BeattyParams, beatty_floors, chi_delta, count_members, discrepancy,
                               enumerate_members, frac_points, is_member, member_mask, norm_criterion,
                               sandwich_polys, witness_member)
from beatty_lab.errors import InputError, RationalParameterError
from beatty_lab.irrational import Interval, Surd

from conftest import PHI, SQRT2, SQRT3
from oracles import beatty_set, mp_surd

PAIRS = [
    (SQRT2, Surd.rational(0)), (SQRT2, Surd.rational(Fraction(7, 10))), (PHI, Surd.rational(0)),
    (SQRT3, Surd.rational(Fraction(13, 10))), (Surd(1, 1, 7, 3), Surd(0, 1, 2, 5)),
    (Surd(3, 2, 11, 1), Surd(1, 1, 3, 4)), (Surd(0, 1, 5, 7), Surd.rational(0)),
    (Surd(5, 1, 13, 2), Surd(2, 1, 13, 9)), (Surd(0, 3, 2, 1), Surd.rational(Fraction(1, 3))),
    (Surd(7, 1, 19, 1), Surd(0, 1, 19, 1)),
]


@pytest.mark.parametrize("m,want", [(4, True), (3, False), (1, True)])
def test_membership_examples(m, want):
    assert is_member(m, BeattyParams(SQRT2)) is want


def test_enumerate_examples():
    assert enumerate_members(12, BeattyParams(SQRT2)) == [1, 2, 4, 5, 7, 8, 9, 11, 12]
    assert enumerate_members(3, BeattyParams(PHI)) == [1, 3]
    assert enumerate_members(0, BeattyParams(SQRT2)) == []


def test_rational_alpha_rejected():
    with pytest.raises(RationalParameterError):
        BeattyParams(Surd.rational(Fraction(3, 2)))
    with pytest.raises(InputError):
        BeattyParams(SQRT2, Surd.rational(-1))
    p = BeattyParams(Interval(Fraction("1.4142135623"), Fraction("1.4142135624")))
    assert not p.verified_irrational


@pytest.mark.parametrize("alpha,beta", PAIRS)
def test_norm_criterion_agrees_with_witness(alpha, beta):
    params = BeattyParams(alpha, beta)
    ms = np.arange(1, 10**4 + 1)
    cutoff = params.small_m_cutoff()
    witness = np.array([witness_member(int(m), params) for m in ms])
    norm = np.array([norm_criterion(int(m), params) for m in ms if m > cutoff])
    assert np.array_equal(norm, witness[ms > cutoff])
    assert np.array_equal(member_mask(ms, params), witness)
    oracle = np.zeros(10**4 + 1, dtype=bool)
    oracle[beatty_set(10**4, alpha, beta)] = True
    assert np.array_equal(witness, oracle[1:])


@pytest.mark.parametrize("alpha,beta", PAIRS[:4])
def test_floors_match_mpmath(alpha, beta):
    params = BeattyParams(alpha, beta)
    got = beatty_floors(1, 2000, params)
    a, b = mp_surd(alpha), mp_surd(beta)
    assert got.tolist() == [int(mpmath.floor(n * a + b)) for n in range(1, 2001)]
    far = beatty_floors(10**12, 10**12 + 50, params)
    assert far.tolist() == [int(mpmath.floor(n * a + b)) for n in range(10**12, 10**12 + 51)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PAIRS), st.integers(1, 10**5))
def test_count_identity(pair, N):
    alpha, beta = pair
    if float(alpha) <= 1:
        return
    params = BeattyParams(alpha, beta)
    a, b = float(alpha), float(beta)
    assert abs(count_members(N, params) - N / a) <= b / a + 2


def test_count_at_a_million():
    params = BeattyParams(SQRT2, Surd.rational(Fraction(7, 10)))
    c = count_members(10**6, params)
    assert abs(c - 10**6 / math.sqrt(2)) <= 0.7 / math.sqrt(2) + 2


@pytest.mark.parametrize("theta,delta,want", [(Fraction(3, 10), Fraction(35, 100), 1),
                                              (Fraction(1, 2), Fraction(1, 4), 0), (SQRT2, Fraction(42, 100), 1)])
def test_chi_delta(theta, delta, want):
    assert chi_delta(theta, delta) == want


def test_sandwich_examples():
    s = sandwich_polys(0.25, 1)
    assert s.lower(np.array([0.0]))[0] <= 1 <= s.upper(np.array([0.0]))[0]
    s = sandwich_polys(0.3, 8)
    assert s.lower(np.array([0.45]))[0] <= 0 <= s.upper(np.array([0.45]))[0]
    for delta in (0.05, 0.2, 0.45):
        for L in (3, 10):
            s = sandwich_polys(delta, L)
            cap = min(2 * delta + 1 / (L + 1), 0.5)
            assert abs(s.c_minus[2]) <= cap and abs(s.c_plus[2]) <= cap


def test_sandwich_constant_terms_and_grid():
    s = sandwich_polys(0.2, 16)
    assert s.a0_minus == pytest.approx(0.4 - 1 / 17, abs=1e-15)
    assert s.a0_plus == pytest.approx(0.4 + 1 / 17, abs=1e-15)
    grid = s.validation_grid()
    assert len(grid) == 10**4
    for e in (0.2 - 1e-9, 0.2 + 1e-9, -0.2 - 1e-9, -0.2 + 1e-9):
        assert np.any(grid == e)
    x = np.linspace(-0.5, 0.5, 2**14, endpoint=False)
    assert s.lower(x).mean() == pytest.approx(s.a0_minus, abs=1e-12)
    assert s.upper(x).mean() == pytest.approx(s.a0_plus, abs=1e-12)


def _brute_discrepancy(x):
    """sup over intervals with endpoints at sample points (open or closed)."""
    x = sorted(x)
    M = len(x)
    best = 0.0
    pts = [0.0] + x + [1.0]
    for a, b in itertools.combinations_with_replacement(pts, 2):
        closed = sum(a <= t <= b for t in x)
        opened = sum(a < t < b for t in x)
        best = max(best, closed / M - (b - a), (b - a) - opened / M)
    return best


def test_discrepancy_examples():
    assert discrepancy([0.0]) == 1.0
    assert discrepancy([k / 10 for k in range(10)]) == pytest.approx(0.1, abs=1e-15)
    pts = frac_points(SQRT2, 100)
    got = discrepancy(pts)
    assert 0.005 < got < 0.05
    assert got == pytest.approx(_brute_discrepancy(list(pts)), abs=1e-12)


def test_frac_points_exact():
    pts = frac_points(SQRT2, 1000, Fraction(7, 10))
    a = mp_surd(SQRT2)
    want = [float((n * a + mpmath.mpf(7) / 10) % 1) for n in range(1, 1001)]
    assert np.allclose(pts, want, rtol=0, atol=1e-15)
