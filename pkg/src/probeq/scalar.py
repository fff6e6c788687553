"""Exact arithmetic in the quadratic field Q(sqrt 2).

A :class:`Scalar` is stored as three integers ``(a, b, d)`` denoting
``(a + b*sqrt2) / d`` with ``d > 0`` and ``gcd(a, b, d) == 1``.  The public
``rat``/``surd`` views give the two coordinates as reduced fractions.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

import mpmath

ScalarLike = Union["Scalar", int, Fraction]

LT, EQ, GT = -1, 0, 1
_SQRT2_F = math.sqrt(2)

_FRAC = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<rat>{_FRAC})(?=$|[+-]))?"
    rf"(?:(?P<surd>[+-]?(?:\d+(?:/\d+)?)?)\*?sqrt2)?$"
)


def _sign_of(a: int, b: int) -> int:
    """Sign of a + b*sqrt2 for integers a, b."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # opposite signs: compare a^2 with 2 b^2
    diff = a * a - 2 * b * b
    if a > 0:
        return 1 if diff > 0 else -1
    return -1 if diff > 0 else 1


class Scalar:
    __slots__ = ("_a", "_b", "_d", "_float")

    def __init__(self, rat: ScalarLike = 0, surd: Rational | int = 0):
        if isinstance(rat, Scalar):
            if surd:
                rat = rat + Scalar(0, surd)
            self._a, self._b, self._d = rat._a, rat._b, rat._d
            self._float = None
            return
        r = Fraction(rat)
        s = Fraction(surd)
        d = r.denominator * s.denominator // math.gcd(r.denominator, s.denominator)
        self._set(r.numerator * (d // r.denominator), s.numerator * (d // s.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(math.gcd(a, b), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d
        self._float = None

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> Scalar:
        obj = cls.__new__(cls)
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, value: ScalarLike | str) -> Scalar:
        if isinstance(value, Scalar):
            return value
        if isinstance(value, str):
            return parse_scalar(value)
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot interpret {value!r} as a Scalar")

    # -- coordinates ---------------------------------------------------------

    @property
    def rat(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def surd(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    def to_fraction(self) -> Fraction:
        if self._b:
            raise ValueError(f"{self} is irrational")
        return Fraction(self._a, self._d)

    @property
    def denominator(self) -> int:
        """Denominator of a rational scalar."""
        return self.to_fraction().denominator

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar(other)
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        if d1 == d2:
            return Scalar._raw(a1 + a2, b1 + b2, d1)
        return Scalar._raw(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw(-self._a, -self._b, self._d)

    def __pos__(self) -> Scalar:
        return self

    def __abs__(self) -> Scalar:
        return -self if self.sign() < 0 else self

    def __sub__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar(other)
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar(other)
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        return Scalar._raw(a1 * a2 + 2 * b1 * b2, a1 * b2 + a2 * b1, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        a, b, d = self._a, self._b, self._d
        norm = a * a - 2 * b * b
        if norm == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(d * a, -d * b, norm)

    def __truediv__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other: ScalarLike) -> Scalar:
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> Scalar:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order ---------------------------------------------------------------

    def sign(self) -> int:
        return _sign_of(self._a, self._b)

    def compare(self, other: ScalarLike) -> int:
        if not isinstance(other, Scalar):
            other = Scalar.coerce(other)
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        if a1 == a2 and b1 == b2 and d1 == d2:
            return 0
        if b1 or b2:
            # decide from float approximations when their error bounds separate them
            try:
                f1, e1 = self._approx()
                f2, e2 = other._approx()
                if f1 - f2 > e1 + e2:
                    return 1
                if f2 - f1 > e1 + e2:
                    return -1
            except OverflowError:
                pass
        return _sign_of(a1 * d2 - a2 * d1, b1 * d2 - b2 * d1)

    def _approx(self) -> tuple[float, float]:
        """A float value and a bound on its absolute error."""
        if self._float is None:
            a, b, d = self._a, self._b, self._d
            value = (a + b * _SQRT2_F) / d if max(abs(a), abs(b)) < 2**53 else float(a) / d + float(b) / d * _SQRT2_F
            self._float = (value, (abs(a) + 2 * abs(b)) / d * 1e-14 + 1e-300)
        return self._float

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    # rational fast paths avoid the general sign test on hot comparison loops
    def __lt__(self, other: ScalarLike) -> bool:
        if type(other) is Scalar and not (self._b or other._b):
            return self._a * other._d < other._a * self._d
        return self.compare(other) < 0

    def __le__(self, other: ScalarLike) -> bool:
        if type(other) is Scalar and not (self._b or other._b):
            return self._a * other._d <= other._a * self._d
        return self.compare(other) <= 0

    def __gt__(self, other: ScalarLike) -> bool:
        if type(other) is Scalar and not (self._b or other._b):
            return self._a * other._d > other._a * self._d
        return self.compare(other) > 0

    def __ge__(self, other: ScalarLike) -> bool:
        if type(other) is Scalar and not (self._b or other._b):
            return self._a * other._d >= other._a * self._d
        return self.compare(other) >= 0

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def floor(self) -> int:
        a, b, d = self._a, self._b, self._d
        if b == 0:
            return a // d
        r = math.isqrt(2 * b * b)
        n = (a + r) // d if b > 0 else (a - r - 1) // d
        while Scalar(n + 1) <= self:
            n += 1
        while Scalar(n) > self:
            n -= 1
        return n

    def ceil(self) -> int:
        return -((-self).floor())

    # -- conversions ---------------------------------------------------------

    def __float__(self) -> float:
        if self._b == 0:
            return self._a / self._d
        return self._approx()[0]

    def to_mpf(self) -> mpmath.mpf:
        """Evaluate at the current mpmath working precision."""
        value = mpmath.mpf(self._a)
        if self._b:
            value += self._b * mpmath.sqrt(2)
        return value / self._d

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"


ZERO = Scalar(0)
ONE = Scalar(1)
SQRT2 = Scalar(0, 1)


def format_scalar(s: Scalar) -> str:
    """Render as ``p/q`` or ``p/q+r/s*sqrt2`` (integers without a slash)."""
    rat, surd = s.rat, s.surd
    if surd == 0:
        return str(rat)
    surd_txt = f"{surd}*sqrt2"
    if rat == 0:
        return surd_txt
    return f"{rat}{'' if surd < 0 else '+'}{surd_txt}"


def parse_scalar(text: str) -> Scalar:
    text = str(text).replace(" ", "")
    m = _SCALAR_RE.match(text)
    if not text or m is None or (m.group("rat") is None and m.group("surd") is None):
        raise ValueError(f"malformed scalar {text!r}")
    rat = Fraction(m.group("rat")) if m.group("rat") else Fraction(0)
    surd_txt = m.group("surd")
    if surd_txt is None:
        surd = Fraction(0)
    elif surd_txt in ("", "+"):
        surd = Fraction(1)
    elif surd_txt == "-":
        surd = Fraction(-1)
    else:
        surd = Fraction(surd_txt)
    return Scalar(rat, surd)


def scalar_compare(a: ScalarLike, b: ScalarLike) -> int:
    """Exact three-way comparison: returns LT (-1), EQ (0) or GT (1)."""
    return Scalar.coerce(a).compare(b)


def nu(s: ScalarLike, k: int) -> int:
    """The integer v with v/2^k < s <= (v+1)/2^k."""
    s = Scalar.coerce(s)
    if s.sign() <= 0:
        raise ValueError(f"nu requires a positive scalar, got {s}")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return (s * (1 << k)).ceil() - 1
