"""Exact scalars: binomials, falling factorials and Gaussian rationals.

Python ``int`` is the arbitrary-precision integer and :class:`fractions.Fraction`
the reduced rational.  :class:`GaussianRational` stores ``(re_num + i*im_num) / den``
over one common positive denominator, reduced so that ``gcd(re_num, im_num, den) == 1``.
That canonical form makes equality structural and keeps arithmetic cheap, which
matters because the verification sweeps perform tens of millions of operations.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "GaussianRational",
    "binomial",
    "falling_factorial",
    "conj",
    "abs_squared",
    "format_rational",
    "parse_rational",
    "gaussian_to_json",
    "gaussian_from_json",
    "PascalTable",
    "common_denominator",
]

Scalar = Union[int, Fraction, "GaussianRational"]

_gcd = math.gcd


def binomial(t: int, k: int) -> int:
    """C(t, k) for ``t >= 0``; zero when ``k < 0`` or ``k > t``."""
    if t < 0:
        raise ValueError(f"binomial top must be nonnegative, got {t}")
    if k < 0 or k > t:
        return 0
    return math.comb(t, k)


def falling_factorial(t: int, s: int) -> int:
    """t (t-1) ... (t-s+1); the empty product for ``s == 0``."""
    if s < 0:
        raise ValueError(f"falling factorial length must be nonnegative, got {s}")
    out = 1
    for j in range(s):
        out *= t - j
    return out


class PascalTable:
    """Memoized binomial rows 0..size, indexed ``table(t, k)``."""

    __slots__ = ("rows",)

    def __init__(self, size: int) -> None:
        rows = [[1]]
        for t in range(1, size + 1):
            prev = rows[-1]
            rows.append([1] + [prev[j - 1] + prev[j] for j in range(1, t)] + [1])
        self.rows = rows

    def __call__(self, t: int, k: int) -> int:
        if k < 0 or k > t:
            return 0
        return self.rows[t][k]


def _as_parts(value) -> tuple[int, int, int]:
    if isinstance(value, GaussianRational):
        return value._nr, value._ni, value._d
    if isinstance(value, int):
        return value, 0, 1
    if isinstance(value, Fraction):
        return value.numerator, 0, value.denominator
    raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")


def _make(nr: int, ni: int, d: int) -> "GaussianRational":
    if d < 0:
        nr, ni, d = -nr, -ni, -d
    g = 1 if d == 1 else _gcd(_gcd(nr, ni), d)
    if g != 1:
        nr //= g
        ni //= g
        d //= g
    z = object.__new__(GaussianRational)
    z._nr = nr
    z._ni = ni
    z._d = d
    return z


class GaussianRational:
    """An element of Q(i), immutable."""

    __slots__ = ("_nr", "_ni", "_d")

    def __new__(cls, re=0, im=0):
        if isinstance(re, str):
            re = parse_rational(re)
        if isinstance(im, str):
            im = parse_rational(im)
        if isinstance(re, GaussianRational) and im == 0:
            return re
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // _gcd(re.denominator, im.denominator)
        return _make(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    @classmethod
    def from_parts(cls, re_num: int, im_num: int, den: int) -> "GaussianRational":
        """``(re_num + i*im_num) / den`` from integers, normalized."""
        if den == 0:
            raise ZeroDivisionError("GaussianRational with zero denominator")
        return _make(re_num, im_num, den)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Canonical ``(re_num, im_num, den)``."""
        return self._nr, self._ni, self._d

    @classmethod
    def coerce(cls, value: Scalar) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return _make(*_as_parts(value))

    # -- parts -------------------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self._nr, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._ni, self._d)

    def is_real(self) -> bool:
        return self._ni == 0

    def conjugate(self) -> "GaussianRational":
        return _make(self._nr, -self._ni, self._d)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GaussianRational):
            nr, ni, d = other._nr, other._ni, other._d
        elif isinstance(other, (int, Fraction)):
            nr, ni, d = _as_parts(other)
        else:
            return NotImplemented
        if d == self._d:
            return _make(self._nr + nr, self._ni + ni, d)
        return _make(self._nr * d + nr * self._d, self._ni * d + ni * self._d, self._d * d)

    __radd__ = __add__

    def __neg__(self):
        return _make(-self._nr, -self._ni, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            nr, ni, d = other._nr, other._ni, other._d
        elif isinstance(other, (int, Fraction)):
            nr, ni, d = _as_parts(other)
        else:
            return NotImplemented
        if d == self._d:
            return _make(self._nr - nr, self._ni - ni, d)
        return _make(self._nr * d - nr * self._d, self._ni * d - ni * self._d, self._d * d)

    def __rsub__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, d = self._nr, self._ni, self._d
            c, e, f = other._nr, other._ni, other._d
            return _make(a * c - b * e, a * e + b * c, d * f)
        if isinstance(other, int):
            return _make(self._nr * other, self._ni * other, self._d)
        if isinstance(other, Fraction):
            p, q = other.numerator, other.denominator
            return _make(self._nr * p, self._ni * p, self._d * q)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("GaussianRational division by zero")
            return _make(self._nr, self._ni, self._d * other)
        if isinstance(other, Fraction):
            if other == 0:
                raise ZeroDivisionError("GaussianRational division by zero")
            return _make(self._nr * other.denominator, self._ni * other.denominator,
                         self._d * other.numerator)
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return GaussianRational.coerce(other) * self.inverse()

    def inverse(self) -> "GaussianRational":
        # 1/((a+bi)/d) = d(a-bi)/(a^2+b^2)
        a, b, d = self._nr, self._ni, self._d
        norm = a * a + b * b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero GaussianRational")
        return _make(d * a, -d * b, norm)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = _ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self._nr == other._nr and self._ni == other._ni and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._ni == 0 and Fraction(self._nr, self._d) == other
        return NotImplemented

    def __hash__(self):
        if self._ni == 0:
            return hash(Fraction(self._nr, self._d))
        return hash((self._nr, self._ni, self._d))

    def __bool__(self):
        return self._nr != 0 or self._ni != 0

    def __repr__(self):
        return f"GaussianRational({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        re_s, im_s = format_rational(self.re), format_rational(self.im)
        if self._ni == 0:
            return re_s
        if self._nr == 0:
            return f"{im_s}i"
        sign = "-" if self._ni < 0 else "+"
        return f"{re_s}{sign}{format_rational(abs(self.im))}i"


_ONE = _make(1, 0, 1)
GaussianRational.ONE = _ONE
GaussianRational.ZERO = _make(0, 0, 1)
GaussianRational.I = _make(0, 1, 1)


def common_denominator(values) -> tuple[int, list]:
    """``(D, [(re_num, im_num), ...])`` with every value equal to ``(re_num + i*im_num) / D``.

    Lets hot loops accumulate in plain integers and normalize once at the end.
    """
    parts = [_as_parts(v) for v in values]
    D = 1
    for _, _, d in parts:
        D = D * d // _gcd(D, d)
    return D, [(nr * (D // d), ni * (D // d)) for nr, ni, d in parts]


def conj(z: Scalar) -> GaussianRational:
    return GaussianRational.coerce(z).conjugate()


def abs_squared(z: Scalar) -> Fraction:
    z = GaussianRational.coerce(z)
    return Fraction(z._nr * z._nr + z._ni * z._ni, z._d * z._d)


# -- serialization ---------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def format_rational(q: Union[int, Fraction]) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``; bare ints are accepted too."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"not a rational: {text!r}")
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(match.group(1)), den)


def gaussian_to_json(z: Scalar) -> dict:
    z = GaussianRational.coerce(z)
    return {"re": format_rational(z.re), "im": format_rational(z.im)}


def gaussian_from_json(obj) -> GaussianRational:
    """Accepts ``{"re": .., "im": ..}`` or a bare rational string / int."""
    if isinstance(obj, dict):
        unknown = set(obj) - {"re", "im"}
        if unknown:
            raise ValueError(f"unexpected keys {sorted(unknown)}")
        return GaussianRational(parse_rational(obj.get("re", "0")), parse_rational(obj.get("im", "0")))
    return GaussianRational(parse_rational(obj))
