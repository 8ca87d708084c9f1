import os
import subprocess
import sys

import numpy as np
import pytest

from beatty_lab import _pykernels, kernels
from beatty_lab.irrational import Surd
from beatty_lab.primes import prime_powers_upto

from conftest import PHI, SQRT2

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")


def test_numpy_phase_words_carry():
    ns = np.array([0, 1, 2, 2**40 + 3], dtype=np.uint64)
    w = (1 << 128) - 12345
    c = (1 << 128) - 99
    got = _pykernels.phase_words(ns, w >> 64, w & (2**64 - 1), c >> 64, c & (2**64 - 1))
    want = [((int(n) * w + c) % (1 << 128)) >> 64 for n in ns]
    assert got.tolist() == want


@compiled
def test_backends_agree():
    ns, ws = prime_powers_upto(200000)
    for theta in (SQRT2, PHI, Surd(3, 2, 7, 11)):
        a = kernels.weighted_exp_sums(ns, ws, theta, range(1, 6), kern=kernels.backend)
        b = kernels.weighted_exp_sums(ns, ws, theta, range(1, 6), kern=_pykernels)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-9)
    w = (1 << 128) // 7
    u = ns.view(np.uint64)
    assert np.array_equal(kernels.backend.phase_words(u, w >> 64, w & (2**64 - 1), 5, 9),
                          _pykernels.phase_words(u, w >> 64, w & (2**64 - 1), 5, 9))


@pytest.mark.parametrize("kern", [_pykernels, kernels.backend])
def test_thread_count_is_invisible(kern):
    ns, ws = prime_powers_upto(100000)
    one = kernels.weighted_exp_sums(ns, ws, SQRT2, range(1, 9), threads=1, kern=kern)
    four = kernels.weighted_exp_sums(ns, ws, SQRT2, range(1, 9), threads=4, kern=kern)
    assert np.array_equal(one, four)


def test_pure_env_forces_fallback():
    code = "from beatty_lab import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, BEATTY_LAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
