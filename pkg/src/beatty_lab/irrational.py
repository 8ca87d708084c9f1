"""Exact quadratic surds and rational-endpoint intervals.

Every real parameter (alpha, beta, theta) is either a :class:`Surd`, an exact
number ``(p + q*sqrt(D))/r``, or an :class:`Interval` with rational endpoints
that encloses a number known only to finite precision.  Decisions (floors,
comparisons) are exact for surds and certified for intervals; when an interval
cannot decide, :class:`UndecidableAtPrecision` is raised instead of guessing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Callable, Sequence, Union

from .errors import InputError, UndecidableAtPrecision

DEFAULT_MAX_RADIUS = Fraction(1, 10**10)

# precision ladder (bits) used when surds of different fields must be combined
_BITS_LADDER = (128, 256, 512, 1024, 2048, 4096, 8192)
_MIXED_BITS = 512
FIXED_BITS = 128
_FIXED_ONE = 1 << FIXED_BITS


class IncompatibleSurds(ArithmeticError):
    """Two irrational surds live in different quadratic fields."""


def _square_part(D):
    """Split D = s*s*core with core squarefree (trial division up to 10**6)."""
    s = 1
    root = math.isqrt(D)
    if root * root == D:
        return root, 1
    f = 2
    while f * f <= D and f <= 10**6:
        ff = f * f
        while D % ff == 0:
            D //= ff
            s *= f
        f += 1 if f == 2 else 2
    return s, D


@dataclass(frozen=True)
class Surd:
    """The number (p + q*sqrt(D)) / r, kept in canonical form.

    Canonical form: r > 0, D squarefree and > 1, gcd(p, q, r) == 1.  Rationals
    are surds with q == 0 and D == 2.
    """

    p: int
    q: int = 0
    D: int = 2
    r: int = 1

    def __post_init__(self):
        p, q, D, r = (int(v) for v in (self.p, self.q, self.D, self.r))
        if r == 0:
            raise ZeroDivisionError("surd denominator is zero")
        if D < 1:
            raise InputError(f"surd radicand must be positive, got {D}")
        if q != 0:
            s, D = _square_part(D)
            q *= s
            if D == 1:
                p, q = p + q, 0
        if q == 0:
            D = 2
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "r", r)

    @classmethod
    def sqrt(cls, D):
        return cls(0, 1, D, 1)

    @classmethod
    def rational(cls, value):
        value = Fraction(value)
        return cls(value.numerator, 0, 2, value.denominator)

    @property
    def is_rational(self):
        return self.q == 0

    def as_fraction(self):
        if self.q:
            raise ValueError("irrational surd has no Fraction value")
        return Fraction(self.p, self.r)

    # arithmetic -----------------------------------------------------------

    def _field(self, other):
        if self.q == 0:
            return other.D
        if other.q == 0 or other.D == self.D:
            return self.D
        raise IncompatibleSurds(f"sqrt({self.D}) and sqrt({other.D})")

    @staticmethod
    def _coerce(other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._field(o)
        return Surd(self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, D, self.r * o.r)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.q, self.D, self.r)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._field(o)
        return Surd(self.p * o.p + self.q * o.q * D, self.p * o.q + self.q * o.p, D, self.r * o.r)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.p * self.p - self.q * self.q * self.D
        if norm == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return Surd(self.r * self.p, -self.r * self.q, self.D, norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Surd(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # decisions ------------------------------------------------------------

    def sign(self):
        a, b = self.p, self.q
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 D (never equal, D is not a square)
        big = a * a > b * b * self.D
        return (1 if big else -1) if a > 0 else (-1 if big else 1)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self):
        if self.q == 0:
            return self.p // self.r
        s = math.isqrt(self.q * self.q * self.D)
        whole = self.p + s if self.q > 0 else self.p - s - 1
        return whole // self.r

    def ceil(self):
        return -((-self).floor())

    def conjugate(self):
        return Surd(self.p, -self.q, self.D, self.r)

    def __lt__(self, other):
        return (other - self).sign() > 0

    def __le__(self, other):
        return (other - self).sign() >= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        a, b, D, r = self.p, self.q, self.D, self.r
        if b == 0:
            return float(Fraction(a, r))
        root = Fraction(math.isqrt(D << 200), 1 << 100)
        if (a >= 0) == (b >= 0) or a == 0:
            return float((a + b * root) / r)
        # opposite signs: multiply through by the conjugate to avoid cancellation
        num = a * a - b * b * D
        return float(Fraction(num) / (r * (a - b * root)))

    def __str__(self):
        if self.q == 0:
            return str(Fraction(self.p, self.r))
        sign = "+" if self.q >= 0 else "-"
        return f"({self.p}{sign}{abs(self.q)}*sqrt({self.D}))/{self.r}"


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_mid_rad(cls, mid, rad, max_radius=DEFAULT_MAX_RADIUS):
        mid, rad = _to_fraction(mid), _to_fraction(rad)
        if rad < 0:
            raise InputError("interval radius must be non-negative")
        if max_radius is not None and rad >= max_radius:
            raise InputError(f"interval radius {float(rad):.3g} is not below {float(max_radius):.3g}")
        return cls(mid - rad, mid + rad)

    @classmethod
    def point(cls, value):
        v = Fraction(value)
        return cls(v, v)

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    @property
    def rad(self):
        return (self.hi - self.lo) / 2

    def _coerce(self, other):
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.point(other)
        if isinstance(other, Surd):
            return to_interval(other, _MIXED_BITS)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def inverse(self):
        if self.lo <= 0 <= self.hi:
            raise UndecidableAtPrecision("interval division by an interval containing 0")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = Interval.point(1)
        for _ in range(e):
            result = result * self
        return result

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def sign(self):
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        raise UndecidableAtPrecision(f"sign of interval [{float(self.lo)}, {float(self.hi)}]")

    def floor(self):
        f = math.floor(self.lo)
        if math.floor(self.hi) != f:
            raise UndecidableAtPrecision(f"interval [{float(self.lo)}, {float(self.hi)}] straddles an integer")
        return f

    def ceil(self):
        return -((-self).floor())

    def __float__(self):
        return float(self.mid)

    def __str__(self):
        return format_interval(self)


RealParam = Union[Surd, Interval]


# conversion helpers -------------------------------------------------------

def _to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if "/" in s:
            return Fraction(s)
        try:
            return Fraction(Decimal(s))
        except InvalidOperation:
            raise InputError(f"cannot parse number {value!r}") from None
    raise InputError(f"cannot convert {value!r} to a rational")


def as_real(value) -> RealParam:
    """Coerce ints, Fractions, floats (by their repr), strings and reals to a RealParam."""
    if isinstance(value, (Surd, Interval)):
        return value
    if isinstance(value, bool):
        raise InputError("booleans are not real parameters")
    if isinstance(value, str):
        return parse_real(value)
    return Surd.rational(_to_fraction(value))


def is_exact(x):
    return isinstance(x, Surd)


def to_interval(x, bits=_MIXED_BITS):
    """Rational enclosure of x; surds get width about 2**-bits, intervals pass through."""
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        return Interval.point(x)
    if x.q == 0:
        return Interval.point(Fraction(x.p, x.r))
    scale = 1 << bits
    s = math.isqrt(x.q * x.q * x.D * scale * scale)
    if x.q > 0:
        lo, hi = Fraction(x.p * scale + s, scale), Fraction(x.p * scale + s + 1, scale)
    else:
        lo, hi = Fraction(x.p * scale - s - 1, scale), Fraction(x.p * scale - s, scale)
    return Interval(lo / x.r, hi / x.r)


def decide(compute: Callable, values: Sequence[RealParam]):
    """Evaluate ``compute(*values)`` exactly when possible, else on intervals.

    Surds from different quadratic fields are retried on enclosures of growing
    precision; user-supplied intervals get exactly one attempt.
    """
    values = tuple(as_real(v) for v in values)
    if all(isinstance(v, Surd) for v in values):
        try:
            return compute(*values)
        except IncompatibleSurds:
            pass
        for bits in _BITS_LADDER:
            try:
                return compute(*(to_interval(v, bits) for v in values))
            except UndecidableAtPrecision:
                continue
        raise UndecidableAtPrecision("precision ladder exhausted")
    return compute(*(to_interval(v, _MIXED_BITS) for v in values))


# the three public operations ----------------------------------------------

def floor_linear(n: int, alpha: RealParam, beta: RealParam) -> int:
    """Exact floor(n*alpha + beta)."""
    return decide(lambda a, b: (a * n + b).floor(), (alpha, beta))


def dist_nearest_int(x: RealParam) -> RealParam:
    """Distance from x to the nearest integer, exact for surds."""
    x = as_real(x)
    if isinstance(x, Surd):
        nearest = (x + Fraction(1, 2)).floor()
        d = x - nearest
        return -d if d.sign() < 0 else d
    if x.hi - x.lo >= 1:
        return Interval(Fraction(0), Fraction(1, 2))
    candidates = [x.lo, x.hi]
    k = math.floor(2 * x.lo) + 1
    while Fraction(k, 2) < x.hi:
        candidates.append(Fraction(k, 2))
        k += 1
    vals = [abs(c - round(c)) for c in candidates]
    return Interval(min(vals), max(vals))


def certified_less(x: RealParam, y: RealParam) -> bool:
    """True iff x < y; raises UndecidableAtPrecision on overlapping intervals."""
    return decide(lambda a, b: (b - a).sign() > 0, (x, y))


def fixed_point_frac(x: RealParam):
    """Return (w, radius) with w = floor(frac(x) * 2**128) and the enclosure radius.

    For surds the word is exact, so the phase of n*x is known to n * 2**-128.
    """
    x = as_real(x)
    if isinstance(x, Surd):
        return (x * _FIXED_ONE).floor() % _FIXED_ONE, 0.0
    return math.floor(x.mid * _FIXED_ONE) % _FIXED_ONE, float(x.rad)


# text format ----------------------------------------------------------------

_SURD_RE = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(?:(\d+)\s*\*\s*)?sqrt\(\s*(\d+)\s*\)\s*\)\s*(?:/\s*([+-]?\d+))?$"
)
_SQRT_RE = re.compile(r"^([+-]?\d*)\s*\*?\s*sqrt\(\s*(\d+)\s*\)$")
_INTERVAL_RE = re.compile(r"^\s*([^±]+?)\s*(?:±|\+-|\+/-)\s*(\S+)\s*$")


def parse_real(text: str, max_radius=DEFAULT_MAX_RADIUS) -> RealParam:
    """Parse ``(p+q*sqrt(D))/r``, ``sqrt(D)``, a rational/decimal, or ``m±e``."""
    s = text.strip()
    m = _SURD_RE.match(s)
    if m:
        p, sign, q, D, r = m.groups()
        qv = int(q or 1) if sign == "+" else -int(q or 1)
        return Surd(int(p), qv, int(D), int(r) if r else 1)
    m = _SQRT_RE.match(s)
    if m:
        coef = m.group(1)
        c = -1 if coef == "-" else (1 if coef in ("", "+") else int(coef))
        return Surd(0, c, int(m.group(2)), 1)
    m = _INTERVAL_RE.match(s)
    if m:
        return Interval.from_mid_rad(_to_fraction(m.group(1)), _to_fraction(m.group(2)), max_radius)
    return Surd.rational(_to_fraction(s))


def format_interval(x: Interval, digits=40) -> str:
    """``mid±rad`` with the midpoint's decimal rounding folded into the radius."""
    with localcontext() as ctx:
        ctx.prec = digits
        mid = Decimal(x.mid.numerator) / Decimal(x.mid.denominator)
    rad = x.rad + abs(Fraction(mid) - x.mid)
    if rad == 0:
        return f"{mid}±0"
    exp = math.floor(math.log10(rad)) - 2
    mant = math.ceil(rad / Fraction(10) ** exp)
    return f"{mid}±{mant // 100}.{mant % 100:02d}E{exp + 2}"


def format_real(x: RealParam) -> str:
    return str(x)
