"""Univariate residue toolkit over the rationals.

Exact polynomials and truncated Laurent series, residues at zero, residues at a
movable pole via derivatives, and the single-coordinate residue formulas used to
evaluate the moment sums.  Each formula comes paired with an independent check
(direct summation or coefficient extraction) in :func:`selftest`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import binomial

__all__ = [
    "RationalPolynomial",
    "TruncatedSeries",
    "residue_at_zero",
    "binomial_via_residue",
    "geometric_family",
    "direct_power_series",
    "derivative_residue",
    "resquad_closed_form",
    "resquad_family_check",
    "inner_sum_via_residue",
    "inner_sum_closed_form",
    "inner_sum_direct",
    "selftest",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 32
ZERO_DEGREE = -1  # degree reported for the zero polynomial


def _trim(coeffs) -> tuple:
    coeffs = [Fraction(v) for v in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class RationalPolynomial:
    """Dense polynomial in w; ``coeffs[i]`` multiplies ``w**i``; no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        self.coeffs = _trim(coeffs)

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "RationalPolynomial":
        return cls([0] * power + [coeff])

    @classmethod
    def binomial_power(cls, n: int, shift: int = 0) -> "RationalPolynomial":
        """(1+w)^n * w^shift by repeated multiplication."""
        out = cls([1])
        one_plus_w = cls([1, 1])
        for _ in range(n):
            out = out * one_plus_w
        return out * cls.monomial(shift)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial([self.coefficient(i) + other.coefficient(i) for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * _as_poly(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([v * other for v in self.coeffs])
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self, times: int = 1) -> "RationalPolynomial":
        coeffs = list(self.coeffs)
        for _ in range(times):
            coeffs = [i * coeffs[i] for i in range(1, len(coeffs))]
        return RationalPolynomial(coeffs)

    def __call__(self, w) -> Fraction:
        acc = Fraction(0)
        for v in reversed(self.coeffs):
            acc = acc * w + v
        return acc

    def __repr__(self):
        return f"RationalPolynomial({[str(v) for v in self.coeffs]})"


def _as_poly(v) -> RationalPolynomial:
    if isinstance(v, RationalPolynomial):
        return v
    return RationalPolynomial([v])


class TruncationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TruncatedSeries:
    """Laurent series ``sum coeffs[i] w^(valuation+i)`` known exactly through ``w^order``.

    Products track precision: multiplying by a principal part lowers the order up
    to which the result is known, and reading past it raises :class:`TruncationError`.
    """

    coeffs: tuple
    order: int
    valuation: int = 0

    def __post_init__(self):
        keep = max(0, self.order - self.valuation + 1)
        object.__setattr__(self, "coeffs", tuple(Fraction(v) for v in self.coeffs[:keep]))

    @classmethod
    def from_polynomial(cls, p: RationalPolynomial, order: int) -> "TruncatedSeries":
        return cls(p.coeffs, order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls((1,), order)

    def coefficient(self, k: int) -> Fraction:
        if k > self.order:
            raise TruncationError(f"coefficient of w^{k} unknown beyond order {self.order}")
        i = k - self.valuation
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def dense(self) -> tuple:
        """Coefficients of w^0..w^order (requires no principal part)."""
        if any(self.coeffs[i] for i in range(min(len(self.coeffs), -self.valuation))):
            raise ValueError("series has a principal part")
        return tuple(self.coefficient(k) for k in range(self.order + 1))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = min(self.order, other.order)
        low = min(self.valuation, other.valuation)
        return TruncatedSeries(
            [self.coefficient(k) + other.coefficient(k) for k in range(low, order + 1)], order, low)

    def scale(self, s) -> "TruncatedSeries":
        return TruncatedSeries([v * s for v in self.coeffs], self.order, self.valuation)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        order = min(self.order + other.valuation, other.order + self.valuation)
        low = self.valuation + other.valuation
        out = [Fraction(0)] * max(0, order - low + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= len(out):
                    break
                out[k] += a * b
        return TruncatedSeries(out, order, low)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; needs a nonzero constant term and valuation 0."""
        if self.valuation != 0 or not self.coeffs or self.coeffs[0] == 0:
            raise ZeroDivisionError("series inverse needs a nonzero constant term")
        u0 = self.coeffs[0]
        inv = [Fraction(1) / u0]
        for k in range(1, self.order + 1):
            acc = Fraction(0)
            for j in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc += self.coeffs[j] * inv[k - j]
            inv.append(-acc / u0)
        return TruncatedSeries(inv, self.order)

    def shift(self, power: int) -> "TruncatedSeries":
        """Multiply by w^power exactly (precision moves with it)."""
        return TruncatedSeries(self.coeffs, self.order + power, self.valuation + power)


def residue_at_zero(series: TruncatedSeries) -> Fraction:
    """Coefficient of w^-1."""
    return series.coefficient(-1)


def binomial_via_residue(n: int, k: int) -> int:
    """C(n, k) as the residue at zero of (1+w)^n / w^(k+1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    poly = RationalPolynomial.binomial_power(n)
    # a polynomial is exact to any order; keep enough to reach w^-1 after the shift
    series = TruncatedSeries(poly.coeffs, max(n, k)).shift(-(k + 1))
    value = residue_at_zero(series)
    assert value.denominator == 1
    return value.numerator


# sum_k k^s w^k = sum_j GEOMETRIC_NUMERATORS[s][j] * w^j / (1-w)^(j+1)
GEOMETRIC_NUMERATORS = {
    0: {0: 1},
    1: {1: 1},
    2: {1: 1, 2: 2},
    3: {1: 1, 2: 6, 3: 6},
}


def _one_minus_w_power(j: int, order: int) -> TruncatedSeries:
    p = RationalPolynomial([1])
    for _ in range(j):
        p = p * RationalPolynomial([1, -1])
    return TruncatedSeries(p.coeffs, order)


def geometric_family(s: int, order: int = DEFAULT_ORDER, numerators: Optional[dict] = None) -> TruncatedSeries:
    """Closed form of sum_k k^s w^k expanded through w^order by series inversion."""
    if order < 1:
        raise ValueError("order must be >= 1")
    numerators = GEOMETRIC_NUMERATORS if numerators is None else numerators
    total = TruncatedSeries((), order)
    for j, coeff in numerators[s].items():
        term = _one_minus_w_power(j + 1, order).inverse().shift(j)
        total = total + TruncatedSeries(term.coeffs, order, term.valuation).scale(coeff)
    return total


def direct_power_series(s: int, order: int) -> tuple:
    return tuple(Fraction(k ** s) for k in range(order + 1))


def derivative_residue(f: RationalPolynomial, pole, k: int) -> Fraction:
    """Residue of f(w)/(w-pole)^k for polynomial f: D^(k-1) f(pole) / (k-1)!."""
    if k < 1:
        raise ValueError("pole order must be >= 1")
    return f.derivative(k - 1)(Fraction(pole)) / math.factorial(k - 1)


def _ff(t: int, s: int) -> int:
    out = 1
    for j in range(s):
        out *= t - j
    return out


def resquad_closed_form(a: int, c: int, w_m, order: int) -> Fraction:
    """Hand-expanded product-rule residue of j! (1+w)^(a-c) w^c / (w-w_m)^(j+1), j = order-1."""
    w_m = Fraction(w_m)
    d = a - c
    one = 1 + w_m

    def term(coeff, p_one, p_w):
        if coeff == 0:
            return Fraction(0)
        return coeff * one ** p_one * w_m ** p_w

    if order == 2:
        return term(d, d - 1, c) + term(c, d, c - 1)
    if order == 3:
        return (term(d * (d - 1), d - 2, c) + term(2 * d * c, d - 1, c - 1)
                + term(c * (c - 1), d, c - 2))
    if order == 4:
        return (term(d * (d - 1) * (d - 2), d - 3, c) + term(3 * d * (d - 1) * c, d - 2, c - 1)
                + term(3 * d * c * (c - 1), d - 1, c - 2) + term(c * (c - 1) * (c - 2), d, c - 3))
    raise ValueError("order must be 2, 3 or 4")


def resquad_family_check(a: int, c: int, w_m, order: int) -> tuple:
    """(derivative route, closed form) for the residue at w_m of j! f/(w-w_m)^(j+1)."""
    if Fraction(w_m) == 0:
        raise ValueError("w_m must be nonzero")
    j = order - 1
    f = RationalPolynomial.binomial_power(a - c, c) * math.factorial(j)
    return derivative_residue(f, w_m, order), resquad_closed_form(a, c, w_m, order)


def inner_sum_via_residue(a: int, c: int, s: int, numerators: Optional[dict] = None) -> Fraction:
    """sum_k C(a-c, k-c) k^s as residues of (1+w)^(a-c) w^c / (w-1)^(j+1) at w = 1."""
    if c > a:
        return Fraction(0)
    numerators = GEOMETRIC_NUMERATORS if numerators is None else numerators
    f = RationalPolynomial.binomial_power(a - c, c)
    return sum((coeff * derivative_residue(f, 1, j + 1) for j, coeff in numerators[s].items()),
               Fraction(0))


def inner_sum_direct(a: int, c: int, s: int) -> Fraction:
    if c > a:
        return Fraction(0)
    return Fraction(sum(binomial(a - c, k - c) * k ** s for k in range(c, a + 1)))


def inner_sum_closed_form(a: int, c: int, s: int) -> Fraction:
    """Per-coordinate unrestricted sums 2^(a-c-s) * bracket_s(a, c)."""
    d, t = a - c, a + c
    bracket = {0: 1, 1: t, 2: t * t + d, 3: t * (t * t + 3 * d)}[s]
    return Fraction(bracket) * (Fraction(2) ** (d - s))


# --------------------------------------------------------------------------
# self test

@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


POLE_LOCATIONS = (Fraction(1), Fraction(2), Fraction(-1, 2), Fraction(3, 5))


def _suite(name: str, cases, fn: Callable) -> SuiteResult:
    failures = []
    count = 0
    for case in cases:
        count += 1
        got = fn(*case)
        if got is not True:
            failures.append((case, got))
    return SuiteResult(name, count, failures)


def selftest(order: int = DEFAULT_ORDER, mutate: Optional[str] = None, seed: int = 0) -> list:
    """Run every residue-engine property suite; returns a list of :class:`SuiteResult`.

    ``mutate`` may name ``"geometric.<s>.<j>"`` to bump one closed-form numerator.
    """
    if order < 8:
        raise ValueError("self test order must be >= 8")
    numerators = {s: dict(v) for s, v in GEOMETRIC_NUMERATORS.items()}
    if mutate is not None:
        parts = mutate.split(".")
        if len(parts) != 3 or parts[0] != "geometric":
            raise ValueError(f"unknown residue mutation {mutate!r}")
        s, j = int(parts[1]), int(parts[2])
        if s not in numerators or j not in numerators[s]:
            raise ValueError(f"unknown residue mutation {mutate!r}")
        numerators[s][j] += 1

    results = []

    def binom_case(n, k):
        got = binomial_via_residue(n, k)
        ref = binomial(n, k)
        return True if got == ref else (got, ref)

    results.append(_suite("binomial_via_residue", ((n, k) for n in range(21) for k in range(-2, n + 3)),
                          binom_case))

    def geom_case(s):
        got = geometric_family(s, order, numerators).dense()
        ref = direct_power_series(s, order)
        return True if got == ref else "coefficient mismatch"

    results.append(_suite("geometric_family", ((s,) for s in range(4)), geom_case))

    def resquad_case(a, c, w, o):
        lhs, rhs = resquad_family_check(a, c, w, o)
        return True if lhs == rhs else (lhs, rhs)

    results.append(_suite(
        "resquad_family",
        ((a, c, w, o) for a in range(9) for c in range(a + 1) for w in POLE_LOCATIONS for o in (2, 3, 4)),
        resquad_case))

    def inner_case(a, c, s):
        via = inner_sum_via_residue(a, c, s, numerators)
        direct = inner_sum_direct(a, c, s)
        closed = inner_sum_closed_form(a, c, s)
        return True if via == direct == closed else (via, direct, closed)

    results.append(_suite("inner_sum_via_residue",
                          ((a, c, s) for a in range(11) for c in range(a + 1) for s in range(4)),
                          inner_case))

    rng = random.Random(f"{seed}:series-inverse")
    inv_order = min(order, 16)

    def inverse_case(k):
        coeffs = [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(inv_order + 1)]
        if coeffs[0] == 0:
            coeffs[0] = Fraction(1)
        u = TruncatedSeries(coeffs, inv_order)
        prod = (u * u.inverse()).dense()
        want = (Fraction(1),) + (Fraction(0),) * inv_order
        return True if prod == want else "u * u^-1 != 1"

    results.append(_suite("series_inverse", ((k,) for k in range(20)), inverse_case))
    return results
