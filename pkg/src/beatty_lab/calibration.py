"""Measured ratios LHS/RHS for the bounds with implied constants.

Each probe draws random parameter points from a seeded generator and evaluates the
left side directly.  The calibration grid's maxima are stored in
``data/calibration.json`` (regenerate with ``python -m beatty_lab.calibration``);
a held-out grid drawn from the same distribution with another seed checks stability.
"""

from __future__ import annotations

import json
import math
import random
from importlib import resources
from typing import Dict, List

import numpy as np

from . import expsums as es
from .contfrac import RationalApprox, cf_expand
from .irrational import Surd
from .primes import APClass, lambda_table, mobius_upto, prime_powers_upto

CALIBRATION_SEED = 1729
HELD_OUT_SEED = 4104
GRID_SIZE = 1000
EPS = es.DEFAULT_EPS
PROBES = ("lemma3", "lemma4_1", "lemma4_2", "lemma6", "lemma7", "prop1", "prop2")
DATA_FILE = "calibration.json"


def _loguniform(rng, lo, hi):
    return int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))


def _random_theta(rng) -> Surd:
    while True:
        D = rng.randint(2, 200)
        if math.isqrt(D) ** 2 != D:
            return Surd(rng.randint(0, 5), 1, D, rng.randint(1, 9))


def _random_ap(rng, d_max=7) -> APClass:
    d = rng.randint(1, d_max)
    if d == 1:
        return APClass()
    return APClass(d, rng.choice([f for f in range(1, d) if math.gcd(f, d) == 1]))


def _random_convergent(rng, theta, q_max) -> RationalApprox:
    """A convergent a/q of theta (so |theta - a/q| < q^-2) with q <= q_max."""
    convs = [(p, q) for p, q in cf_expand(theta, 40).convergents if q <= q_max]
    p, q = rng.choice(convs)
    return RationalApprox(p, q)


def draw_point(probe: str, rng: random.Random) -> Dict:
    theta = _random_theta(rng)
    if probe == "lemma3":
        x = rng.randint(0, 10**4)
        return {"x": x, "x_prime": x + _loguniform(rng, 1, 10**4), "ap": _random_ap(rng, 30), "theta": theta}
    if probe in ("lemma4_1", "lemma4_2"):
        return {"X": _loguniform(rng, 1, 3000), "Y": _loguniform(rng, 1, 3000), "theta": theta,
                "approx": _random_convergent(rng, theta, 10**5)}
    if probe == "lemma6":
        X, W = _loguniform(rng, 8, 400), _loguniform(rng, 8, 400)
        return {"X": X, "W": W, "L": rng.randint(1, 4), "ap": _random_ap(rng), "theta": theta,
                "N_cut": 2 * X * W, "approx": _random_convergent(rng, theta, 10**5)}
    if probe == "lemma7":
        N = _loguniform(rng, 10**3, 2 * 10**5)
        X = _loguniform(rng, 4, math.isqrt(N))
        return {"X": X, "W": N // X, "L": rng.randint(1, 4), "ap": _random_ap(rng), "theta": theta,
                "N_cut": N, "approx": _random_convergent(rng, theta, 10**5)}
    if probe == "prop1":
        k = rng.choice((2, 3))
        N = _loguniform(rng, 10**3, 2 * 10**4 if k == 3 else 10**5)
        coeffs = [rng.randint(0, 9) for _ in range(k)] + [rng.randint(1, 3)]
        lead = theta * coeffs[-1]
        return {"N": N, "L": rng.randint(1, 6), "coeffs": coeffs, "theta": theta,
                "approx": _random_convergent(rng, lead, 10**5)}
    if probe == "prop2":
        # outside N >= max(q d^2 / L, d^6), q >= d^2 only the trivial bound LN/d is claimed
        while True:
            N, L, ap = _loguniform(rng, 10**3, 3 * 10**5), rng.randint(1, 8), _random_ap(rng)
            approx = _random_convergent(rng, theta, 10**5)
            d, q = ap.d, approx.q
            if q >= d * d and N >= max(q * d * d / L, d**6):
                return {"N": N, "L": L, "ap": ap, "theta": theta, "approx": approx}
            theta = _random_theta(rng)
    raise ValueError(f"unknown probe {probe!r}")


def measure(probe: str, pt: Dict) -> float:
    if probe == "lemma3":
        value, bound = es.ap_geometric_sum(pt["x"], pt["x_prime"], pt["ap"], pt["theta"])
        return abs(value) / bound
    if probe in ("lemma4_1", "lemma4_2"):
        rep = es.vinogradov_minsums(pt["X"], pt["Y"], pt["approx"], pt["theta"])
        return rep.ratio1 if probe == "lemma4_1" else rep.ratio2
    if probe == "prop1":
        N, L, cs = pt["N"], pt["L"], pt["coeffs"]
        n, _ = prime_powers_upto(N)
        vals = np.zeros(len(n), dtype=np.int64)
        for c in reversed(cs):
            vals = vals * n + c
        S = es.prop1_sum(N, L, vals, pt["theta"])
        return S / es.prop1_bound(N, L, pt["approx"].q, len(cs) - 1, EPS)
    q, d = pt["approx"].q, pt["ap"].d
    if probe == "lemma6":
        X, W, L = pt["X"], pt["W"], pt["L"]
        mu = mobius_upto(W).astype(np.float64)
        lam = lambda_table(2 * X)
        S = es.bilinear_S(X, W, L, pt["ap"], pt["theta"], mu, lam, pt["N_cut"])
        F = float(lam[X + 1: 2 * X + 1].max(initial=0.0)) or 1.0
        return S / es.typeII_bound(X, W, L, d, q, 1.0, F, EPS)
    if probe == "lemma7":
        X, W, L = pt["X"], pt["W"], pt["L"]
        mu = mobius_upto(2 * X).astype(np.float64)
        logs = np.log(np.maximum(np.arange(W + 1), 1))
        S = es.bilinear_S(X, W, L, pt["ap"], pt["theta"], logs, mu, pt["N_cut"])
        # log u is stripped by partial summation at the price of a log W factor
        return S / es.typeI_bound(X, W, L, d, q, max(1.0, math.log(W)), EPS)
    if probe == "prop2":
        spec = es.ExpSumSpec(pt["N"], pt["L"], pt["ap"], pt["theta"])
        return es.s_theta(spec) / es.prop2_bound(pt["N"], pt["L"], q, d, EPS)
    raise ValueError(f"unknown probe {probe!r}")


def run_grid(probe: str, seed: int, size: int = GRID_SIZE) -> List[float]:
    rng = random.Random(f"{probe}:{seed}")
    return [measure(probe, draw_point(probe, rng)) for _ in range(size)]


def calibrate(seed: int = CALIBRATION_SEED, size: int = GRID_SIZE) -> Dict:
    return {"seed": seed, "grid_size": size, "eps": EPS,
            "max_ratio": {p: max(run_grid(p, seed, size)) for p in PROBES}}


def load_constants() -> Dict:
    return json.loads(resources.files("beatty_lab").joinpath("data", DATA_FILE).read_text())


def main():
    import pathlib
    out = pathlib.Path(__file__).with_name("data") / DATA_FILE
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(calibrate(), indent=2, sort_keys=True) + "\n")
    print(out.read_text())


if __name__ == "__main__":
    main()
