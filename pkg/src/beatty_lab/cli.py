"""beatty-lab: command-line front end.

Every run writes one document (JSON) or table (CSV) that embeds the tool version,
the fully resolved configuration and, unless --reproducible is given, wall-clock
seconds.  Exit status: 0 on success, 1 for bad input, 2 for precision or capacity
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import random
import re
import sys
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .errors import BeattyLabError, InputError, NumericError
from .kernels import THREADS_ENV, default_threads

CONFIG_HELP = """\
config files: one `key = value` per line, `#` starts a comment.  Keys are the long
flag names without dashes (e.g. `alpha`, `n`, `d`).  A comma-separated value makes
a grid axis and the run covers the cartesian product; polynomial coefficients `g`
are themselves comma-separated and cannot form an axis.  Flags given on the command
line override the file.  Unknown keys are rejected.

Thread count: --threads, else the BEATTY_LAB_THREADS environment variable, else 1.
"""


class CliInputError(InputError):
    pass


def _fail(flag: str, msg: str):
    raise CliInputError(f"{flag}: {msg}")


# -- typed parameters -----------------------------------------------------------

def _int(lo=None):
    def conv(s):
        try:
            v = int(s)
        except ValueError:
            raise InputError(f"expected an integer, got {s!r}") from None
        if lo is not None and v < lo:
            raise InputError(f"must be >= {lo}, got {v}")
        return v
    return conv


def _float(s):
    try:
        v = float(s)
    except ValueError:
        raise InputError(f"expected a number, got {s!r}") from None
    if not math.isfinite(v):
        raise InputError(f"expected a finite number, got {s!r}")
    return v


def _bool(s):
    t = str(s).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InputError(f"expected true/false, got {s!r}")


def _real(s):
    from .irrational import parse_real
    try:
        return parse_real(s)
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        raise InputError(f"cannot parse real number {s!r} ({exc})") from None


def _poly(s):
    from .theorems import IntPolynomial
    return IntPolynomial.parse(s)


@dataclass
class Param:
    key: str
    conv: Callable
    default: Optional[str]
    help: str
    grid: bool = True

    @property
    def flag(self):
        return "--" + self.key.replace("_", "-")


ALPHA = Param("alpha", _real, None, 'irrational step, e.g. "(0+1*sqrt(2))/1", "sqrt(3)" or "1.41421356237±1e-11"')
BETA = Param("beta", _real, "0", "shift beta >= 0")
N = Param("n", _int(1), None, "range limit N")
D = Param("d", _int(1), "1", "modulus of the progression")
F = Param("f", _int(0), "0", "residue class (0 with d = 1 means no restriction)")
EPS = Param("eps", _float, "0.01", "epsilon in the error expressions")
G = Param("g", _poly, "0,0,1", "polynomial coefficients a0,...,ak (default x^2)", grid=False)
LL = Param("l", _int(1), "1", "convergent offset l")


@dataclass
class Command:
    name: str
    help: str
    params: List[Param]
    run: Callable
    csv_columns: List[str]


def _ap(v):
    from .primes import APClass
    try:
        return APClass(v["d"], v["f"])
    except InputError as exc:
        flag = "--d" if v["d"] < 1 else "--f"
        _fail(flag, str(exc))


def _params(v):
    from .beatty import BeattyParams
    from .errors import RationalParameterError
    try:
        return BeattyParams(v["alpha"], v.get("beta", 0))
    except RationalParameterError as exc:
        _fail("--alpha", f"{exc}; the step must be irrational")
    except InputError as exc:
        _fail("--beta" if "beta" in str(exc) else "--alpha", str(exc))


# -- subcommand bodies ------------------------------------------------------------

def run_cf(v, ctx):
    from .contfrac import cf_expand
    return cf_expand(v["x"], v["terms"]).to_dict()


def _cheb(kind):
    def run(v, ctx):
        from .primes import chebyshev_psi, chebyshev_theta
        fn = chebyshev_theta if kind == "theta" else chebyshev_psi
        return {"value": fn(v["n"], _ap(v))}
    return run


def run_beatty(v, ctx):
    from .beatty import count_members, enumerate_members
    params = _params(v)
    if v["action"] == "count":
        return {"count": count_members(v["n"], params)}
    return {"members": enumerate_members(v["n"], params)}


def run_expsum(v, ctx):
    from .expsums import ExpSumSpec, expsum_report
    spec = ExpSumSpec(v["n"], v["l"], _ap(v), v["theta"], v["include_l0"])
    rep = expsum_report(spec, U=v["u"] or None, q=v["q"] or None, eps=v["eps"],
                        with_pieces=v["pieces"], threads=ctx["threads"])
    return {"direct": rep.direct, "pieces": rep.pieces, "residual": rep.residual,
            "bound": rep.bound_rhs, "ratio": rep.ratio, **rep.params}


def _theorem_dict(rep, ctx):
    out = {"lhs": rep.lhs, "main": rep.main, "error": rep.error,
           "predicted_bound": rep.predicted_bound, "relative_deviation": rep.relative_deviation,
           "extra": dict(rep.extra)}
    out["q"] = rep.extra.get("q")
    return out


def run_thm1(v, ctx):
    from .theorems import thm1_experiment
    rep = thm1_experiment(v["g"], _params(v), v["n"], v["eps"], v["prime_powers"])
    return _theorem_dict(rep, ctx)


def run_thm3(v, ctx):
    from .theorems import thm3_experiment
    if v["d"] == 1 and v["f"] != 0:
        _fail("--f", "f must be 0 when d = 1")
    rep = thm3_experiment(_params(v), _ap(v), v["n"], v["eps"])
    return _theorem_dict(rep, ctx)


def _bound_dict(res):
    return {"bound": res.bound, "m": res.m, "p_m": res.p_m, "p_ml": res.p_ml,
            "exponents": list(res.exponents), "N_choice": res.N_choice, "eta": res.eta}


def _search(v, params, ap=None):
    from .errors import NotFoundBelowCap
    from .primes import APClass
    from .theorems import least_prime_search
    if not v.get("cap"):
        return None
    try:
        return least_prime_search(v.get("g"), params, v["cap"], ap or APClass())
    except NotFoundBelowCap:
        return None


def run_thm2(v, ctx):
    from .calibration import load_constants
    from .theorems import thm2_bound, thm2_min_l
    params = _params(v)
    try:
        res = thm2_bound(v["g"], params, v["l"], v["eps"])
    except InputError as exc:
        _fail("--eps" if "eps" in str(exc) else "--l", str(exc))
    out = _bound_dict(res)
    C = load_constants()["max_ratio"]["prop1"]
    out["min_l"] = thm2_min_l(v["g"], params, v["eps"], C)
    out["calibrated_C"] = C
    p = _search(v, params)
    out["least_prime"] = p
    out["within_bound"] = None if p is None else p <= res.bound
    return out


def run_remark1(v, ctx):
    from .theorems import remark1_bound
    params, ap = _params(v), _ap(v)
    out = _bound_dict(remark1_bound(params, ap, v["l"], v["eps"]))
    v = dict(v, g=None)
    p = _search(v, params, ap)
    out["least_prime"] = p
    out["within_bound"] = None if p is None else p <= out["bound"]
    return out


def run_least_prime(v, ctx):
    from .theorems import least_prime_search
    return {"p": least_prime_search(v["g"], _params(v), v["cap"], _ap(v))}


def run_constants(v, ctx):
    from .primes import check_explicit_constants
    r = check_explicit_constants(v["n"])
    return {"theta": r.theta, "psi": r.psi, "tail": r.tail, "theta_lower": r.theta_lower,
            "psi_upper": r.psi_upper, "tail_upper": r.tail_upper, "theta_ok": r.theta_ok,
            "psi_ok": r.psi_ok, "tail_ok": r.tail_ok, "all_ok": r.all_ok}


_THM_COLS = ["lhs", "main", "error", "predicted_bound", "relative_deviation", "seconds"]
_BOUND_COLS = ["l", "eps", "m", "p_m", "p_ml", "bound", "least_prime", "seconds"]

COMMANDS = {c.name: c for c in [
    Command("cf", "continued fraction expansion and convergents",
            [Param("x", _real, None, "real number to expand"), Param("terms", _int(1), "20", "number of partial quotients")],
            run_cf, ["x", "terms", "quotients", "seconds"]),
    Command("theta", "Chebyshev theta(N; d, f)", [N, D, F], _cheb("theta"), ["n", "d", "f", "value", "seconds"]),
    Command("psi", "Chebyshev psi(N; d, f)", [N, D, F], _cheb("psi"), ["n", "d", "f", "value", "seconds"]),
    Command("beatty", "members of the Beatty sequence up to N",
            [Param("action", str, None, "enumerate or count", grid=False), ALPHA, BETA, N],
            run_beatty, ["alpha", "beta", "n", "count", "seconds"]),
    Command("expsum", "Lambda-weighted exponential sums, Vaughan pieces and the bound ratio",
            [N, Param("l", _int(1), "1", "number of frequencies L"), D, F,
             Param("theta", _real, None, "frequency base theta"), Param("u", _int(0), "0", "Vaughan cut U (0 = default)"),
             Param("q", _int(0), "0", "denominator q (0 = Dirichlet approximation at sqrt(N))"), EPS,
             Param("pieces", _bool, "true", "also compute the Vaughan pieces"),
             Param("include_l0", _bool, "false", "include the l = 0 term")],
            run_expsum, ["n", "l", "d", "f", "q", "direct", "bound", "ratio", "seconds"]),
    Command("thm1", "primes p <= N with g(p) in the Beatty sequence",
            [G, ALPHA, BETA, N, EPS, Param("prime_powers", _bool, "false", "count prime powers as well")],
            run_thm1, ["g", "alpha", "beta", "n", "eps", "q"] + _THM_COLS),
    Command("thm2", "least-prime bound for g(p) in the Beatty sequence",
            [G, ALPHA, BETA, LL, Param("eps", _float, "0", "epsilon"),
             Param("cap", _int(0), "0", "also search for the least prime up to this cap (0 = skip)")],
            run_thm2, ["g", "alpha", "beta"] + _BOUND_COLS),
    Command("thm3", "Beatty primes in an arithmetic progression",
            [ALPHA, BETA, D, F, N, EPS], run_thm3, ["alpha", "beta", "d", "f", "n", "eps", "q"] + _THM_COLS),
    Command("remark1", "least Beatty prime in a progression: bound",
            [ALPHA, BETA, D, F, LL, Param("eps", _float, "0", "epsilon"),
             Param("cap", _int(0), "0", "also search for the least prime up to this cap (0 = skip)")],
            run_remark1, ["alpha", "beta", "d", "f"] + _BOUND_COLS),
    Command("least-prime", "smallest prime p <= cap (p = f mod d) with g(p) in the sequence",
            [G, ALPHA, BETA, D, F, Param("cap", _int(2), "1000000", "search limit")],
            run_least_prime, ["g", "alpha", "beta", "d", "f", "cap", "p", "seconds"]),
    Command("constants", "explicit Chebyshev inequalities at N",
            [Param("n", _int(1), None, "N (>= 41)")], run_constants,
            ["n", "theta", "psi", "tail", "theta_ok", "psi_ok", "tail_ok", "seconds"]),
]}


# -- configuration ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliInputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file (see below)")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json, csv for grids)")
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--threads", help=f"worker threads (overrides {THREADS_ENV})")
    common.add_argument("--seed", default="0", help="seed for --sample")
    common.add_argument("--sample", default=None, help="run only this many randomly chosen grid points")
    common.add_argument("--reproducible", action="store_true",
                        help="omit wall-clock times so reruns are byte-identical")
    p = _Parser(prog="beatty-lab", description=__doc__, epilog=CONFIG_HELP,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"beatty-lab {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for cmd in COMMANDS.values():
        sp = sub.add_parser(cmd.name, help=cmd.help, parents=[common], epilog=CONFIG_HELP,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        for prm in cmd.params:
            if prm.key == "action":
                sp.add_argument("action", nargs="?", choices=("enumerate", "count"), default=None)
                continue
            dflt = f" (default {prm.default})" if prm.default is not None else " (required)"
            sp.add_argument(prm.flag, dest=prm.key, default=None, help=prm.help + dflt)
    return p


def read_config(path: str) -> Dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        _fail("--config", f"cannot read {path}: {exc.strerror}")
    out = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            _fail("--config", f"{path}:{no}: expected `key = value`")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(cmd: Command, ns: argparse.Namespace) -> List[Dict[str, object]]:
    """Typed parameter points (one per grid point) from config file, flags and defaults."""
    raw = read_config(ns.config) if ns.config else {}
    known = {p.key for p in cmd.params}
    for key in raw:
        if key not in known:
            _fail("--config", f"unknown key {key!r} for {cmd.name} (known: {', '.join(sorted(known))})")
    texts = {}
    for prm in cmd.params:
        text = getattr(ns, prm.key, None)
        texts[prm.key] = text if text is not None else raw.get(prm.key, prm.default)
    missing = [p for p in cmd.params if texts[p.key] is None]
    axes = []
    for prm in cmd.params:
        text = texts[prm.key]
        if text is None:
            continue
        parts = [t.strip() for t in str(text).split(",")] if prm.grid else [str(text)]
        values = []
        for t in parts:
            try:
                values.append((t, prm.conv(t)))
            except InputError as exc:
                _fail(prm.flag, str(exc))
        axes.append(values)
    if missing:
        prm = missing[0]
        _fail(prm.flag if prm.key != "action" else cmd.name,
              "is required" if prm.key != "action" else "an action (enumerate or count) is required")
    keys = [p.key for p in cmd.params]
    points = [dict(zip(keys, combo)) for combo in itertools.product(*axes)]
    if ns.sample is not None:
        k = _flagged("--sample", _int(1), ns.sample)
        seed = _flagged("--seed", _int(), ns.seed)
        if k < len(points):
            idx = sorted(random.Random(seed).sample(range(len(points)), k))
            points = [points[i] for i in idx]
    return points


def _flagged(flag, conv, text):
    try:
        return conv(text)
    except InputError as exc:
        _fail(flag, str(exc))


# -- serialization ----------------------------------------------------------------

def _clean(obj):
    """Floats rounded to 15 significant digits; non-finite values become null."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float("%.15g" % obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return str(obj)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.15g" % v if math.isfinite(v) else "nan"
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def emit_json(doc: Dict) -> bytes:
    return (json.dumps(_clean(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def emit_csv(doc: Dict, columns: Sequence[str]) -> bytes:
    buf = io.StringIO()
    buf.write(f"# beatty-lab {doc['version']} {doc['command']}\n")
    for k, val in sorted(doc["config"].items()):
        buf.write(f"# {k} = {_cell(val)}\n")
    header = [c if c not in ("n", "l") else c.upper() for c in columns]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for run in doc["runs"]:
        row = {**run["point"], **run["result"], "seconds": run.get("seconds")}
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue().encode("utf-8")


# -- entry point --------------------------------------------------------------------

def _threads(ns):
    if ns.threads is not None:
        return _flagged("--threads", _int(1), ns.threads)
    try:
        return default_threads()
    except InputError as exc:
        _fail(THREADS_ENV, str(exc))


def execute(argv: Sequence[str]):
    """Run a command; returns (payload bytes, output path or None)."""
    ns = build_parser().parse_args(list(argv))
    cmd = COMMANDS[ns.command]
    ctx = {"threads": _threads(ns)}
    points = resolve(cmd, ns)
    grid = len(points) > 1
    fmt = ns.format or ("csv" if grid else "json")
    if cmd.name == "beatty" and points[0]["action"][1] == "enumerate" and not grid and ns.format is None:
        typed = {k: v[1] for k, v in points[0].items()}
        res = run_beatty(typed, ctx)
        return "".join(f"{m}\n" for m in res["members"]).encode(), ns.output
    runs = []
    for pt in points:
        typed = {k: v[1] for k, v in pt.items()}
        t0 = time.perf_counter()
        try:
            result = cmd.run(typed, ctx)
        except CliInputError:
            raise
        except InputError as exc:
            raise CliInputError(f"{_guess_flag(cmd, str(exc))}: {exc}") from None
        secs = time.perf_counter() - t0
        if ns.reproducible:
            _strip_times(result)
        run = {"point": {k: v[0] for k, v in pt.items()}, "result": result}
        if not ns.reproducible:
            run["seconds"] = secs
        runs.append(run)
    config = {k: (v[0] if not grid else ",".join(sorted({p[k][0] for p in points}, key=str)))
              for k, v in points[0].items()}
    config.update(threads=ctx["threads"], format=fmt, reproducible=ns.reproducible,
                  seed=ns.seed, sample=ns.sample)
    doc = {"tool": "beatty-lab", "version": __version__, "command": cmd.name, "config": config}
    if fmt == "csv":
        return emit_csv(doc | {"runs": runs}, cmd.csv_columns), ns.output
    if grid:
        doc["runs"] = runs
    else:
        doc["result"] = runs[0]["result"]
        if "seconds" in runs[0]:
            doc["seconds"] = runs[0]["seconds"]
    return emit_json(doc), ns.output


def _guess_flag(cmd, msg):
    """The flag whose name appears first in an error message, else the command."""
    hits = [(m.start(), p.flag) for p in cmd.params if p.key != "action"
            for m in [re.search(rf"\b{p.key}\b", msg, re.IGNORECASE)] if m]
    return min(hits)[1] if hits else cmd.name


def _strip_times(result):
    extra = result.get("extra")
    if isinstance(extra, dict):
        extra.pop("runtime", None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        payload, out = execute(argv)
        if out:
            with open(out, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
        return 0
    except InputError as exc:
        print(f"beatty-lab: error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, BeattyLabError) as exc:
        print(f"beatty-lab: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"beatty-lab: error: --output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
